"""Patch-regression experiment on a grayscale image.

A predictor is trained to estimate each target pixel's intensity from the
pixels of two nearby rectangles; the user's summary of a patch is its mean
intensity. The explanation selector then picks the few neighborhood pixels
that tell such a user the most about the prediction.

Pipeline: load image -> extract patches -> train ridge predictor ->
compute patch-mean summaries -> select explanation -> report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from ._version import __version__
from .errors import (
    DimensionMismatch,
    GeometryTooLarge,
    InfoExplainError,
    InvalidCount,
    InvalidSparsity,
    SingularSystem,
    TooFewSamples,
)
from .dataio import ImageGrid, load_grayscale_image
from .mi import MiValue, conditional_mi, conditional_variance, mi_table
from .model import (
    RNG_NAME,
    ExplanationSupport,
    SampleSet,
    empirical_moments,
)
from .explain import default_method, explain_fit
from .regression import SolverConfig, SparseFit, lasso_path, lasso_path_fits


class Rect(NamedTuple):
    """Axis-aligned rectangle relative to the target pixel.

    Covers rows [row_off, row_off + height) and columns
    [col_off, col_off + width) in target-relative coordinates.
    """

    row_off: int
    col_off: int
    height: int
    width: int

    def contains(self, row: int, col: int) -> bool:
        return (self.row_off <= row < self.row_off + self.height
                and self.col_off <= col < self.col_off + self.width)

    def offsets(self) -> List[Tuple[int, int]]:
        return [(self.row_off + r, self.col_off + c)
                for r in range(self.height) for c in range(self.width)]


@dataclass(frozen=True)
class NeighborhoodGeometry:
    """Two rectangles of context pixels around (but never on) the target."""

    rect1: Rect
    rect2: Rect

    def __post_init__(self):
        for name, rect in (("rect1", self.rect1), ("rect2", self.rect2)):
            rect = Rect(*rect)
            if rect.height < 1 or rect.width < 1:
                raise DimensionMismatch(f"{name} must be nonempty, got {rect}")
            if rect.contains(0, 0):
                raise DimensionMismatch(f"{name} {rect} contains the target pixel")
            object.__setattr__(self, name, rect)

    @property
    def n(self) -> int:
        return (self.rect1.height * self.rect1.width
                + self.rect2.height * self.rect2.width)

    def feature_offsets(self) -> List[Tuple[int, int]]:
        """(row, col) offset per feature: raster order in rect1, then rect2."""
        return self.rect1.offsets() + self.rect2.offsets()


def default_geometry() -> NeighborhoodGeometry:
    """Two 5x5 rectangles flanking the target at +-3 columns (n = 50)."""
    return NeighborhoodGeometry(Rect(-2, -7, 5, 5), Rect(-2, 3, 5, 5))


def target_bounds(image: ImageGrid, geometry: NeighborhoodGeometry
                  ) -> Tuple[int, int, int, int]:
    """Inclusive (row_lo, row_hi, col_lo, col_hi) of valid target pixels."""
    rects = (geometry.rect1, geometry.rect2)
    row_lo = max(0, *(-r.row_off for r in rects))
    row_hi = min(image.height - 1,
                 *(image.height - r.row_off - r.height for r in rects))
    col_lo = max(0, *(-r.col_off for r in rects))
    col_hi = min(image.width - 1,
                 *(image.width - r.col_off - r.width for r in rects))
    if row_lo > row_hi or col_lo > col_hi:
        raise GeometryTooLarge(
            f"geometry does not fit inside a {image.height}x{image.width} image"
        )
    return row_lo, row_hi, col_lo, col_hi


def extract_patches(image: ImageGrid, geometry: NeighborhoodGeometry,
                    stride: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """Neighborhood features and target labels on a stride grid.

    One row per target position; features follow raster order within rect1
    then rect2; the label is the target pixel. Everything is centered by the
    global image mean so the zero-mean modeling assumptions apply.
    """
    if stride < 1:
        raise InvalidCount(f"stride must be >= 1, got {stride}")
    row_lo, row_hi, col_lo, col_hi = target_bounds(image, geometry)
    rows = np.arange(row_lo, row_hi + 1, stride)
    cols = np.arange(col_lo, col_hi + 1, stride)
    grid_r = np.repeat(rows, len(cols))
    grid_c = np.tile(cols, len(rows))
    mean = float(image.pixels.mean())
    offsets = geometry.feature_offsets()
    features = np.empty((len(grid_r), len(offsets)))
    for k, (dr, dc) in enumerate(offsets):
        features[:, k] = image.pixels[grid_r + dr, grid_c + dc]
    labels = image.pixels[grid_r, grid_c] - mean
    features -= mean
    return features, labels


def train_predictor(features: np.ndarray, labels: np.ndarray,
                    ridge: float = 1e-6) -> np.ndarray:
    """Ridge-regression weights: argmin ||labels - features w||^2 + ridge ||w||^2.

    Raises
    ------
    SingularSystem
        If ridge = 0 and the Gram matrix is rank-deficient.
    """
    if ridge < 0:
        raise InvalidSparsity(f"ridge must be >= 0, got {ridge}")
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    if x.ndim != 2 or y.shape != (x.shape[0],):
        raise DimensionMismatch(
            f"features {x.shape} and labels {y.shape} are inconsistent"
        )
    if x.shape[0] < 2:
        raise TooFewSamples(f"need at least 2 rows to train, got {x.shape[0]}")
    gram = x.T @ x
    if ridge == 0.0:
        eigvals = np.linalg.eigvalsh(gram)
        if eigvals[0] <= 1e-12 * max(eigvals[-1], 0.0):
            raise SingularSystem(
                "features are rank-deficient; use ridge > 0"
            )
    return np.linalg.solve(gram + ridge * np.eye(x.shape[1]), x.T @ y)


def compute_user_summary(features: np.ndarray,
                         geometry: NeighborhoodGeometry) -> np.ndarray:
    """Per-patch mean of the neighborhood intensities (the user's summary)."""
    x = np.asarray(features, dtype=float)
    if x.ndim != 2 or x.shape[1] != geometry.n:
        raise DimensionMismatch(
            f"features have {x.shape[1] if x.ndim == 2 else '?'} columns, "
            f"geometry defines {geometry.n} pixels"
        )
    return x.mean(axis=1)


@dataclass(frozen=True)
class ExperimentConfig:
    image_path: str
    s: int
    geometry: NeighborhoodGeometry = field(default_factory=default_geometry)
    stride: int = 7
    method: Optional[str] = None  # None -> dimension-based default
    ridge: float = 1e-6
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    # relative var(yhat|u)/var(yhat) below which the summary is treated as
    # already determining the prediction
    degenerate_tol: float = 1e-8

    def __post_init__(self):
        if self.stride < 1:
            raise InvalidCount(f"stride must be >= 1, got {self.stride}")
        if not 0 <= self.s <= self.geometry.n:
            raise InvalidSparsity(
                f"sparsity must satisfy 0 <= s <= n={self.geometry.n}, got {self.s}"
            )


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    method: str
    n: int
    m: int
    image_mean: float
    predictor_mse: float
    prediction_variance: float
    support: ExplanationSupport
    support_offsets: tuple
    mi: MiValue
    degenerate: bool
    fit: Optional[SparseFit]
    path_summary: tuple  # (lambda, support_size, rss) when method=lasso_path
    samples: Optional[SampleSet] = None  # kept in memory, never serialized

    def to_json_dict(self) -> dict:
        geo = self.config.geometry
        return {
            "schema_version": 1,
            "tool_version": __version__,
            "rng": RNG_NAME,
            "config": {
                "image": self.config.image_path,
                "geometry": {
                    "rect1": list(geo.rect1),
                    "rect2": list(geo.rect2),
                },
                "stride": self.config.stride,
                "s": self.config.s,
                "method": self.method,
                "ridge": self.config.ridge,
                "seed": self.config.seed,
                "degenerate_tol": self.config.degenerate_tol,
                "solver": {
                    "tol": self.config.solver.tol,
                    "max_sweeps": self.config.solver.max_sweeps,
                    "path_points": self.config.solver.path_points,
                    "path_ratio": self.config.solver.path_ratio,
                    "standardize": self.config.solver.standardize,
                },
            },
            "n": self.n,
            "m": self.m,
            "image_mean": self.image_mean,
            "predictor_mse": self.predictor_mse,
            "prediction_variance": self.prediction_variance,
            "degenerate": self.degenerate,
            "support": list(self.support.indices),
            "support_offsets": [list(o) for o in self.support_offsets],
            "mi_nats": "inf" if self.mi.is_infinite else self.mi.nats,
            "cond_var_given_u": self.mi.numerator_var,
            "cond_var_given_u_support": self.mi.denominator_var,
            "fit": self.fit.to_json_dict() if self.fit is not None else None,
            "path_summary": [
                {"lambda": lam, "support_size": size, "rss": rss}
                for lam, size, rss in self.path_summary
            ],
        }


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except InfoExplainError as exc:
        if not getattr(exc, "stage", None):
            exc.stage = name
        raise


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run the full image-explanation pipeline and collect a report.

    Degenerate inputs (constant image, or a summary that already determines
    the prediction up to ``degenerate_tol``) yield an empty support and MI 0
    instead of amplifying numerical noise. Errors from any stage carry a
    ``stage`` attribute naming the stage that failed.
    """
    image = _stage("load-image", load_grayscale_image, config.image_path)
    features, labels = _stage(
        "extract-patches", extract_patches, image, config.geometry, config.stride
    )
    weights = _stage("train-predictor", train_predictor, features, labels,
                     config.ridge)
    predictions = features @ weights
    mse = float(np.mean((labels - predictions) ** 2))
    summaries = _stage("user-summary", compute_user_summary, features,
                       config.geometry)
    samples = SampleSet(features=features, predictions=predictions,
                        summaries=summaries)
    moments = _stage("moments", empirical_moments, samples)
    method = config.method or default_method(samples.n)

    var_y = moments.prediction_variance
    var_given_u = conditional_variance(moments, ())
    degenerate = var_y <= 0.0 or var_given_u <= config.degenerate_tol * var_y

    fit = None
    path_summary: tuple = ()
    if degenerate:
        support = ExplanationSupport((), budget=config.s)
        mi = MiValue(0.0, var_given_u, var_given_u)
    elif method == "lasso_path":
        grid = _stage("lasso-path", lasso_path_fits, samples, config.solver)
        path_summary = tuple((lam, len(f.support), f.rss) for lam, f in grid)
        fit = _stage("select-support", lasso_path, samples, config.s,
                     config.solver, fits=grid)
        support = ExplanationSupport(fit.support, budget=config.s)
        mi = conditional_mi(moments, support)
    else:
        fit = _stage("select-support", explain_fit, samples, config.s, method,
                     config.solver)
        support = ExplanationSupport(fit.support, budget=config.s)
        mi = conditional_mi(moments, support)

    offsets = config.geometry.feature_offsets()
    support_offsets = tuple(offsets[i - 1] for i in support.indices)
    return ExperimentReport(
        config=config,
        method=method,
        n=samples.n,
        m=samples.m,
        image_mean=float(image.pixels.mean()),
        predictor_mse=mse,
        prediction_variance=var_y,
        support=support,
        support_offsets=support_offsets,
        mi=mi,
        degenerate=degenerate,
        fit=fit,
        path_summary=path_summary,
        samples=samples,
    )


def support_mask(geometry: NeighborhoodGeometry,
                 support: ExplanationSupport) -> np.ndarray:
    """0/1 raster over the neighborhood footprint; selected pixels are 1.

    The footprint is the bounding box of both rectangles and the target.
    """
    offsets = geometry.feature_offsets()
    rows = [dr for dr, _ in offsets] + [0]
    cols = [dc for _, dc in offsets] + [0]
    r0, c0 = min(rows), min(cols)
    mask = np.zeros((max(rows) - r0 + 1, max(cols) - c0 + 1))
    for i in support.indices:
        dr, dc = offsets[i - 1]
        mask[dr - r0, dc - c0] = 1.0
    return mask


def experiment_mi_table(samples: SampleSet, s: int, threads: int = 1):
    """Empirical MI table for the experiment's patches (n <= 25 only)."""
    return mi_table(empirical_moments(samples), s, threads=threads)
