"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately re-derive quantities through routes different
from the library code (explicit solves instead of pseudoinverses, closed
forms instead of enumeration) so that tests cross-check rather than echo the
implementation.
"""

import numpy as np
import pytest

from infoexplain import (
    GaussianModel,
    ImageGrid,
    NeighborhoodGeometry,
    Rect,
    SampleSet,
)


# ---------------------------------------------------------------------------
# reference models
# ---------------------------------------------------------------------------

@pytest.fixture
def model_i3():
    """Identity covariance, yhat = x1 + x2, u = x3 (summary independent)."""
    return GaussianModel(np.eye(3), [1.0, 1.0, 0.0], [0.0, 0.0, 1.0])


@pytest.fixture
def model_redundant():
    """yhat = u: the summary contains the prediction exactly."""
    return GaussianModel(np.eye(3), [0.0, 0.0, 1.0], [0.0, 0.0, 1.0])


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def schur_conditional_variance(sigma, target, conditioning):
    """Conditional variance by an explicit least-squares solve.

    var(t | c) = S_tt - S_tc G^-1 S_ct with the solve done by lstsq, an
    independent route from the library's pseudoinverse path.
    """
    sigma = np.asarray(sigma, dtype=float)
    cond = list(conditioning)
    s_tt = sigma[target, target]
    if not cond:
        return float(s_tt)
    c = sigma[target, cond]
    g = sigma[np.ix_(cond, cond)]
    coef, *_ = np.linalg.lstsq(g, c, rcond=None)
    return float(max(s_tt - c @ coef, 0.0))


def modular_objective(w, cov_diag, support_1based):
    """Closed-form var(yhat | u, support) for diagonal covariance and v = 0:
    the objective is modular, sum of w_i^2 C_ii over excluded features."""
    total = 0.0
    inside = set(support_1based)
    for i, (wi, cii) in enumerate(zip(w, cov_diag), start=1):
        if i not in inside:
            total += wi * wi * cii
    return total


def orthonormal_design(m, n, seed):
    """SampleSet with exactly orthonormal feature columns and u = 0."""
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((m, n)))
    y = rng.standard_normal(m)
    return SampleSet(features=q, predictions=y, summaries=np.zeros(m))


# ---------------------------------------------------------------------------
# planted images for the patch experiment
# ---------------------------------------------------------------------------

def planted_geometry():
    """Two 3x4 rectangles strictly left of the target: n = 24 <= 25, so the
    exhaustive solver is applicable alongside OMP and the Lasso path."""
    return NeighborhoodGeometry(Rect(-1, -9, 3, 4), Rect(-1, -4, 3, 4))


def _grid_start(geometry):
    rects = (geometry.rect1, geometry.rect2)
    row_lo = max(0, *(-r.row_off for r in rects))
    col_lo = max(0, *(-r.col_off for r in rects))
    return row_lo, col_lo


def make_planted_image(geometry, planted, *, height=60, width=200, stride=7,
                       noise_sigma=0.0, seed=42):
    """Image whose stride-grid target pixels are a fixed linear combination
    of specific neighborhood pixels.

    ``planted`` maps (row_off, col_off) -> coefficient; coefficients must sum
    to 1 so the relation survives centering by the image mean. Background
    pixels are i.i.d. uniform in [0.2, 0.8], keeping the combination inside
    [0, 1]. Returns (ImageGrid, planted 1-based feature indices).
    """
    offsets = geometry.feature_offsets()
    coeffs = list(planted.items())
    assert abs(sum(c for _, c in coeffs) - 1.0) < 1e-12
    for off, _ in coeffs:
        assert off in offsets, f"offset {off} is not in the geometry"
        assert off[1] < 0, "planted offsets must lie left of the target"
    rng = np.random.default_rng(seed)
    img = rng.uniform(0.2, 0.8, size=(height, width))
    row_lo, col_lo = _grid_start(geometry)
    for r in range(row_lo, height - 1, stride):
        for c in range(col_lo, width, stride):
            value = sum(coef * img[r + dr, c + dc] for (dr, dc), coef in coeffs)
            if noise_sigma > 0.0:
                value += noise_sigma * rng.standard_normal()
            img[r, c] = min(max(value, 0.0), 1.0)
    quantized = np.rint(img * 65535) / 65535
    indices = tuple(sorted(offsets.index(off) + 1 for off, _ in coeffs))
    return ImageGrid(quantized), indices


def make_summary_explains_image(geometry, *, height=60, width=200, stride=7,
                                seed=42):
    """Image whose stride-grid target pixels equal the mean of their
    neighborhood: the user summary determines the label exactly."""
    offsets = geometry.feature_offsets()
    rng = np.random.default_rng(seed)
    img = rng.uniform(0.2, 0.8, size=(height, width))
    row_lo, col_lo = _grid_start(geometry)
    for r in range(row_lo, height - 1, stride):
        for c in range(col_lo, width, stride):
            img[r, c] = np.mean([img[r + dr, c + dc] for dr, dc in offsets])
    quantized = np.rint(img * 65535) / 65535
    return ImageGrid(quantized)
