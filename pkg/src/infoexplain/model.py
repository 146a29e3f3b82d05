"""Domain types for the linear-Gaussian prediction model and its sampling.

The generative setup: features x in R^n are zero-mean with covariance
``cov_x``; the prediction and the user summary are the linear functionals

    yhat = w . x        u = v . x

All second-moment bookkeeping for the stacked vector (x_1..x_n, yhat, u)
lives in :class:`JointMoments`, which is the single sufficient statistic
consumed by the information and search modules.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    FactorizationFailure,
    InvalidCount,
    InvalidSparsity,
    NotPositiveSemidefinite,
    TooFewSamples,
)

# Relative slack for symmetry/PSD validation of user-supplied covariances.
SYMMETRY_RTOL = 1e-10
PSD_RTOL = 1e-10

# Generator used by sample(); recorded in serialized outputs so that runs
# can be reproduced bit-for-bit on the same platform.
RNG_NAME = "numpy-pcg64"


def _as_matrix(a, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be a square matrix, got shape {arr.shape}")
    return arr


def _as_vector(a, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be a 1-d vector, got shape {arr.shape}")
    return arr


def _check_symmetric_psd(sigma: np.ndarray, name: str) -> None:
    scale = float(np.abs(sigma).max()) if sigma.size else 0.0
    asym = float(np.abs(sigma - sigma.T).max())
    if asym > SYMMETRY_RTOL * max(scale, 1e-300):
        raise NotPositiveSemidefinite(
            f"{name} is not symmetric: max |A - A^T| = {asym:.3e} at scale {scale:.3e}"
        )
    eigvals = np.linalg.eigvalsh((sigma + sigma.T) / 2.0)
    lam_max = float(eigvals[-1])
    lam_min = float(eigvals[0])
    if lam_min < -PSD_RTOL * max(lam_max, 0.0):
        raise NotPositiveSemidefinite(
            f"{name} has negative eigenvalue {lam_min:.3e} (largest {lam_max:.3e})"
        )


@dataclass(frozen=True)
class GaussianModel:
    """Ground-truth feature covariance plus predictor and summary weights.

    Parameters
    ----------
    cov_x : (n, n) ndarray
        Feature covariance. Must be symmetric positive semidefinite up to a
        1e-10 relative slack; singular covariances are accepted.
    w : (n,) ndarray
        Predictor weights, yhat = w . x.
    v : (n,) ndarray
        User-summary weights, u = v . x.
    """

    cov_x: np.ndarray
    w: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        cov = _as_matrix(self.cov_x, "cov_x")
        w = _as_vector(self.w, "w")
        v = _as_vector(self.v, "v")
        n = cov.shape[0]
        if w.shape[0] != n or v.shape[0] != n:
            raise DimensionMismatch(
                f"cov_x is {n}x{n} but w has length {w.shape[0]} and v has length {v.shape[0]}"
            )
        if not (np.isfinite(cov).all() and np.isfinite(w).all() and np.isfinite(v).all()):
            raise DimensionMismatch("model parameters must be finite")
        _check_symmetric_psd(cov, "cov_x")
        object.__setattr__(self, "cov_x", cov)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return self.cov_x.shape[0]


def build_gaussian_model(cov_x, w, v) -> GaussianModel:
    """Validate and construct a :class:`GaussianModel`.

    Raises
    ------
    DimensionMismatch
        If shapes are inconsistent.
    NotPositiveSemidefinite
        If ``cov_x`` is asymmetric or has an eigenvalue below the PSD slack.
    """
    return GaussianModel(cov_x, w, v)


@dataclass(frozen=True)
class SampleSet:
    """Rows of (features, prediction, summary) triples.

    ``features`` is (m, n); ``predictions`` and ``summaries`` have length m.
    Every entry must be finite.
    """

    features: np.ndarray
    predictions: np.ndarray
    summaries: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.features, dtype=float)
        y = np.asarray(self.predictions, dtype=float)
        u = np.asarray(self.summaries, dtype=float)
        if x.ndim != 2:
            raise DimensionMismatch(f"features must be 2-d, got shape {x.shape}")
        m, n = x.shape
        if m < 1:
            raise InvalidCount("a SampleSet needs at least one row")
        if n < 1:
            raise DimensionMismatch("a SampleSet needs at least one feature column")
        if y.shape != (m,) or u.shape != (m,):
            raise DimensionMismatch(
                f"features has {m} rows but predictions/summaries have shapes "
                f"{y.shape}/{u.shape}"
            )
        if not (np.isfinite(x).all() and np.isfinite(y).all() and np.isfinite(u).all()):
            raise DimensionMismatch("sample entries must be finite (no NaN/Inf)")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "predictions", y)
        object.__setattr__(self, "summaries", u)

    @property
    def m(self) -> int:
        return self.features.shape[0]

    @property
    def n(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class JointMoments:
    """Second-moment matrix of the stacked vector (x_1..x_n, yhat, u).

    ``sigma`` is (n+2) x (n+2), symmetric PSD. Row/column layout: features
    occupy 0..n-1, yhat sits at index n, u at index n+1. ``source`` is
    ``"analytic"`` or ``"empirical"``; for empirical moments ``sample_count``
    records the number of rows averaged.
    """

    n: int
    sigma: np.ndarray
    source: str
    sample_count: Optional[int] = None

    def __post_init__(self):
        sigma = _as_matrix(self.sigma, "sigma")
        if sigma.shape[0] != self.n + 2:
            raise DimensionMismatch(
                f"sigma must be ({self.n + 2})x({self.n + 2}) for n={self.n}, "
                f"got {sigma.shape}"
            )
        if not np.isfinite(sigma).all():
            raise DimensionMismatch("sigma entries must be finite")
        _check_symmetric_psd(sigma, "sigma")
        if self.source not in ("analytic", "empirical"):
            raise DimensionMismatch(f"unknown moments source {self.source!r}")
        object.__setattr__(self, "sigma", (sigma + sigma.T) / 2.0)

    @property
    def yhat_index(self) -> int:
        return self.n

    @property
    def u_index(self) -> int:
        return self.n + 1

    @property
    def prediction_variance(self) -> float:
        return float(self.sigma[self.n, self.n])


@dataclass(frozen=True)
class ExplanationSupport:
    """A sparse set of 1-based feature indices shown to the user.

    Indices are 1-based to match the ``x1..xn`` column naming used by every
    serialized format; ``budget`` is the sparsity cap the set was selected
    under.
    """

    indices: tuple
    budget: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 1 for i in idx):
            raise InvalidSparsity(f"support indices must be >= 1, got {idx}")
        if list(idx) != sorted(set(idx)):
            raise InvalidSparsity(f"support indices must be sorted and unique, got {idx}")
        if self.budget < 0:
            raise InvalidSparsity(f"budget must be nonnegative, got {self.budget}")
        if len(idx) > self.budget:
            raise InvalidSparsity(
                f"support has {len(idx)} indices, exceeding budget {self.budget}"
            )
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "budget", int(self.budget))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


SupportLike = Union[ExplanationSupport, Sequence[int]]


def as_support(support: SupportLike, n: Optional[int] = None,
               budget: Optional[int] = None) -> ExplanationSupport:
    """Normalize a support given as an ExplanationSupport or a plain sequence
    of 1-based indices, optionally checking indices against the feature
    dimension ``n``."""
    if isinstance(support, ExplanationSupport):
        out = support
    else:
        idx = tuple(sorted(int(i) for i in support))
        out = ExplanationSupport(idx, budget if budget is not None else len(idx))
    if n is not None and any(i > n for i in out.indices):
        raise InvalidSparsity(
            f"support indices {out.indices} exceed feature dimension n={n}"
        )
    return out


def analytic_moments(model: GaussianModel) -> JointMoments:
    """Exact second moments of (x, yhat, u) implied by the model.

    The stacked vector is A x with A = [I; w^T; v^T], so the moment matrix
    is A cov_x A^T:

        [ C    C w      C v   ]
        [ w'C  w'C w    w'C v ]
        [ v'C  v'C w    v'C v ]
    """
    n = model.n
    a = np.vstack([np.eye(n), model.w, model.v])
    sigma = a @ model.cov_x @ a.T
    return JointMoments(n=n, sigma=sigma, source="analytic")


def sample(model: GaussianModel, m: int, seed: int) -> SampleSet:
    """Draw m i.i.d. rows x ~ N(0, cov_x) and attach exact yhat, u.

    The covariance is factorized by symmetric eigendecomposition (not
    Cholesky) so that PSD-but-singular covariances are accepted. For a fixed
    seed the output is bit-reproducible on a given platform.

    Raises
    ------
    InvalidCount
        If ``m < 1``.
    FactorizationFailure
        If ``cov_x`` is numerically indefinite beyond the PSD slack.
    """
    if m < 1:
        raise InvalidCount(f"sample count must be >= 1, got {m}")
    cov = (model.cov_x + model.cov_x.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(cov)
    lam_max = float(eigvals[-1])
    if float(eigvals[0]) < -PSD_RTOL * max(lam_max, 0.0):
        raise FactorizationFailure(
            f"cov_x has eigenvalue {eigvals[0]:.3e}, below the PSD slack"
        )
    root = eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))
    rng = np.random.default_rng(seed)
    features = rng.standard_normal((m, model.n)) @ root.T
    predictions = features @ model.w
    summaries = features @ model.v
    return SampleSet(features=features, predictions=predictions, summaries=summaries)


def empirical_moments(samples: SampleSet, center: bool = False) -> JointMoments:
    """Second moments of the stacked samples, about zero by default.

    The generative model is zero-mean, so moments are not mean-centered
    unless ``center=True`` (intended for external data).

    Raises
    ------
    TooFewSamples
        If ``m < 2``.
    """
    if samples.m < 2:
        raise TooFewSamples(f"need at least 2 samples, got {samples.m}")
    z = np.column_stack([samples.features, samples.predictions, samples.summaries])
    if center:
        z = z - z.mean(axis=0)
    sigma = z.T @ z / samples.m
    return JointMoments(n=samples.n, sigma=sigma, source="empirical",
                        sample_count=samples.m)


def random_gaussian_model(n: int, seed: int, eig_low: float = 0.5,
                          eig_high: float = 2.0) -> GaussianModel:
    """Seeded random model with controlled covariance spectrum.

    The covariance is Q diag(lam) Q^T with Q a Haar-ish orthogonal factor
    (QR of a Gaussian matrix) and lam uniform in [eig_low, eig_high]; w and
    v are standard normal. Useful for simulation studies and verification
    suites.
    """
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    lam = rng.uniform(eig_low, eig_high, size=n)
    cov = (q * lam) @ q.T
    cov = (cov + cov.T) / 2.0
    w = rng.standard_normal(n)
    v = rng.standard_normal(n)
    return GaussianModel(cov, w, v)
