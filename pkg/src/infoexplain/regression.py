"""Empirical sparse-regression solvers for explanation selection.

All solvers fit the decomposition

    yhat ~ alpha * u + beta . x

with the summary coefficient alpha unpenalized and jointly minimized, and a
sparsity control on beta only:

* ``least_squares_on_support`` — unpenalized fit with beta restricted to a
  given index set;
* ``solve_l0`` — best subset of size <= s, by exhaustive enumeration
  (n <= 25) or orthogonal matching pursuit;
* ``solve_lasso`` — L1-penalized fit by cyclic coordinate descent with
  exact soft-thresholding updates;
* ``lasso_path`` — geometric lambda grid with warm starts, picking the
  support of size <= s, then debiasing by an unpenalized refit.

The training residual statistic is the bridge to the exact theory: for the
optimal coefficients, rss/m estimates the conditional variance
var(yhat | u, x_support).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionTooLarge, InvalidSparsity, TooFewSamples
from .mi import MAX_ENUMERATION_DIM
from .model import SampleSet, SupportLike, as_support


@dataclass(frozen=True)
class SolverConfig:
    """Tunables shared by the iterative solvers.

    tol            coordinate-descent stop: max coefficient change per sweep
    max_sweeps     hard cap on coordinate-descent sweeps
    path_points    number of lambdas on the geometric grid
    path_ratio     lambda_min / lambda_max for the grid
    standardize    rescale feature columns to unit RMS before solving
                   (outputs are reported in the original scale)
    """

    tol: float = 1e-8
    max_sweeps: int = 100_000
    path_points: int = 100
    path_ratio: float = 1e-4
    standardize: bool = False

    def __post_init__(self):
        if self.tol <= 0:
            raise InvalidSparsity(f"tol must be > 0, got {self.tol}")
        if self.max_sweeps < 1:
            raise InvalidSparsity(f"max_sweeps must be >= 1, got {self.max_sweeps}")
        if self.path_points < 2:
            raise InvalidSparsity(f"path_points must be >= 2, got {self.path_points}")
        if not 0 < self.path_ratio < 1:
            raise InvalidSparsity(f"path_ratio must be in (0, 1), got {self.path_ratio}")


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True)
class SparseFit:
    """A fitted decomposition yhat ~ alpha*u + beta.x with bookkeeping.

    ``support`` holds the 1-based indices of exactly the nonzero beta
    entries; ``rss`` is the training residual sum of squares, recomputable
    from the inputs. ``lam`` is set for Lasso-based methods, ``converged``
    is False only when coordinate descent hit the sweep cap.
    """

    alpha: float
    beta: np.ndarray
    support: tuple
    rss: float
    method: str
    lam: Optional[float] = None
    converged: bool = True

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "support", tuple(int(i) for i in self.support))

    def residual_variance(self, m: int) -> float:
        return self.rss / m

    def to_json_dict(self) -> dict:
        out = {
            "method": self.method,
            "support": list(self.support),
            "alpha": self.alpha,
            "betas": {str(i): float(self.beta[i - 1]) for i in self.support},
            "rss": self.rss,
            "converged": self.converged,
        }
        if self.lam is not None:
            out["lambda"] = self.lam
        return out


def _design(samples: SampleSet, indices: Sequence[int]) -> np.ndarray:
    cols = [samples.summaries] + [samples.features[:, i - 1] for i in indices]
    return np.column_stack(cols)


def least_squares_on_support(samples: SampleSet,
                             support: SupportLike) -> SparseFit:
    """Unpenalized least squares of yhat on (u, x_i for i in support).

    Solves the normal equations, falling back to a pseudoinverse when the
    Gram matrix is singular (e.g. u identically zero or duplicated
    features). Off-support coefficients are exactly zero.

    Raises
    ------
    TooFewSamples
        Unless m > |support| + 1.
    """
    sup = as_support(support, n=samples.n)
    k = len(sup.indices)
    if samples.m <= k + 1:
        raise TooFewSamples(
            f"need m > |support| + 1 = {k + 1} samples, got {samples.m}"
        )
    d = _design(samples, sup.indices)
    gram = d.T @ d
    rhs = d.T @ samples.predictions
    try:
        theta = np.linalg.solve(gram, rhs)
        if not np.isfinite(theta).all():
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        theta = np.linalg.pinv(gram, rcond=1e-10, hermitian=True) @ rhs
    beta = np.zeros(samples.n)
    for pos, i in enumerate(sup.indices):
        beta[i - 1] = theta[pos + 1]
    resid = samples.predictions - d @ theta
    return SparseFit(
        alpha=float(theta[0]),
        beta=beta,
        support=tuple(i for i in sup.indices if beta[i - 1] != 0.0),
        rss=float(resid @ resid),
        method="least_squares",
    )


def solve_l0(samples: SampleSet, s: int, strategy: str = "exhaustive") -> SparseFit:
    """Best-subset fit: minimize rss subject to at most s nonzero betas.

    ``strategy="exhaustive"`` enumerates every support of size <= s
    (requires n <= 25) and returns the minimum-rss fit, ties broken toward
    the smaller then lexicographically earlier support. ``strategy="omp"``
    greedily grows the support by the feature most correlated with the
    current residual, refitting alpha jointly at every step.

    Raises
    ------
    DimensionTooLarge
        For exhaustive enumeration with n > 25.
    TooFewSamples
        Unless m > s + 1.
    """
    n = samples.n
    if not 0 <= s <= n:
        raise InvalidSparsity(f"sparsity must satisfy 0 <= s <= n={n}, got {s}")
    if samples.m <= s + 1:
        raise TooFewSamples(f"need m > s + 1 = {s + 1} samples, got {samples.m}")
    if strategy == "exhaustive":
        return _l0_exhaustive(samples, s)
    if strategy == "omp":
        return _l0_omp(samples, s)
    raise InvalidSparsity(f"unknown L0 strategy {strategy!r}")


def _l0_exhaustive(samples: SampleSet, s: int) -> SparseFit:
    import itertools

    n = samples.n
    if n > MAX_ENUMERATION_DIM:
        raise DimensionTooLarge(
            f"exhaustive L0 requires n <= {MAX_ENUMERATION_DIM}, got n={n}"
        )
    # rss improvements below round-off scale are ties; the enumeration order
    # (smaller support first, then lexicographic) breaks them
    tie_slack = 1e-12 * float(samples.predictions @ samples.predictions)
    best: Optional[SparseFit] = None
    for size in range(s + 1):
        for combo in itertools.combinations(range(1, n + 1), size):
            fit = least_squares_on_support(samples, combo)
            if best is None or fit.rss < best.rss - tie_slack:
                best = fit
    return replace(best, method="l0_exhaustive")


def _l0_omp(samples: SampleSet, s: int) -> SparseFit:
    x = samples.features
    y = samples.predictions
    col_norms = np.sqrt((x * x).sum(axis=0))
    scale = float(np.linalg.norm(y))
    chosen: List[int] = []
    fit = least_squares_on_support(samples, ())
    while len(chosen) < s:
        resid = y - samples.summaries * fit.alpha - x @ fit.beta
        corr = np.abs(x.T @ resid)
        with np.errstate(invalid="ignore", divide="ignore"):
            corr = np.where(col_norms > 0, corr / col_norms, 0.0)
        for i in chosen:
            corr[i - 1] = -1.0
        j = int(np.argmax(corr)) + 1
        if corr[j - 1] <= 1e-12 * max(scale, 1.0):
            break
        chosen.append(j)
        chosen.sort()
        fit = least_squares_on_support(samples, chosen)
    return replace(fit, method="omp")


def lasso_lambda_max(samples: SampleSet) -> float:
    """Smallest penalty at which the Lasso solution is exactly beta = 0.

    Fits alpha alone, then returns 2 * max_i |x_i . r| over the resulting
    residual r: the KKT condition at zero is |x_i . r| <= lambda/2. A
    1e-12 relative margin keeps beta = 0 exact at this boundary despite
    BLAS rounding differences between the max and the per-coordinate dots.
    """
    base = least_squares_on_support(samples, ())
    resid = samples.predictions - base.alpha * samples.summaries
    return float(2.0 * np.abs(samples.features.T @ resid).max()) * (1.0 + 1e-12)


def solve_lasso(samples: SampleSet, lam: float,
                config: Optional[SolverConfig] = None, *,
                beta0: Optional[np.ndarray] = None,
                alpha0: float = 0.0,
                fixed_alpha: Optional[float] = None) -> SparseFit:
    """L1-penalized fit by cyclic coordinate descent.

    Minimizes sum_i (yhat_i - alpha u_i - beta.x_i)^2 + lam * ||beta||_1
    with alpha unpenalized: each sweep updates alpha exactly, then
    soft-thresholds each beta_j in index order. Soft-thresholding produces
    exact zeros, so ``support`` is literally the nonzero set. Convergence:
    the largest coefficient change in a sweep drops below ``config.tol``.

    ``beta0``/``alpha0`` warm-start the iteration; ``fixed_alpha`` pins the
    summary coefficient instead of optimizing it. If the sweep cap is hit
    the best iterate is returned with ``converged=False``.
    """
    if lam < 0:
        raise InvalidSparsity(f"lambda must be >= 0, got {lam}")
    cfg = config or DEFAULT_CONFIG
    x = samples.features
    y = samples.predictions
    u = samples.summaries

    scales = np.ones(samples.n)
    if cfg.standardize:
        rms = np.sqrt((x * x).mean(axis=0))
        scales = np.where(rms > 0, rms, 1.0)
        x = x / scales

    col_ss = (x * x).sum(axis=0)
    u_ss = float(u @ u)

    beta = np.zeros(samples.n) if beta0 is None else np.array(beta0, dtype=float) * scales
    alpha = float(alpha0) if fixed_alpha is None else float(fixed_alpha)
    resid = y - alpha * u - x @ beta

    half_lam = lam / 2.0
    converged = False
    for sweep in range(cfg.max_sweeps):
        delta = 0.0
        if fixed_alpha is None and u_ss > 0.0:
            step = float(u @ resid) / u_ss
            alpha += step
            resid -= step * u
            delta = abs(step)
        for j in range(samples.n):
            if col_ss[j] == 0.0:
                continue
            b_old = beta[j]
            rho = float(x[:, j] @ resid) + b_old * col_ss[j]
            b_new = math.copysign(max(abs(rho) - half_lam, 0.0), rho)
            b_new /= col_ss[j]
            if b_new != b_old:
                resid -= (b_new - b_old) * x[:, j]
                beta[j] = b_new
                delta = max(delta, abs(b_new - b_old))
        if delta < cfg.tol:
            converged = True
            break
        if (sweep + 1) % 512 == 0:
            # counter incremental drift in the carried residual
            resid = y - alpha * u - x @ beta

    beta_out = beta / scales
    resid = y - alpha * u - samples.features @ beta_out
    return SparseFit(
        alpha=alpha,
        beta=beta_out,
        support=tuple(i + 1 for i in np.flatnonzero(beta_out)),
        rss=float(resid @ resid),
        method="lasso",
        lam=lam,
        converged=converged,
    )


def lasso_path_fits(samples: SampleSet,
                    config: Optional[SolverConfig] = None
                    ) -> List[Tuple[float, SparseFit]]:
    """Warm-started Lasso fits on a geometric lambda grid, largest first.

    The grid runs from lambda_max down to lambda_max * path_ratio over
    ``path_points`` points. Degenerate data with lambda_max = 0 yields the
    single unpenalized point.
    """
    cfg = config or DEFAULT_CONFIG
    lam_max = lasso_lambda_max(samples)
    if lam_max <= 0.0:
        return [(0.0, solve_lasso(samples, 0.0, cfg))]
    grid = lam_max * cfg.path_ratio ** (
        np.arange(cfg.path_points) / (cfg.path_points - 1)
    )
    fits: List[Tuple[float, SparseFit]] = []
    beta = None
    alpha = 0.0
    for lam in grid:
        fit = solve_lasso(samples, float(lam), cfg, beta0=beta, alpha0=alpha)
        fits.append((float(lam), fit))
        beta = fit.beta
        alpha = fit.alpha
    return fits


def _bisect_for_budget(samples: SampleSet, cfg: SolverConfig, s: int,
                       lam_hi: float, fit_hi: SparseFit,
                       lam_lo: float, fit_lo: SparseFit
                       ) -> Tuple[float, SparseFit]:
    """Geometric bisection between two path points whose support sizes
    straddle the budget, looking for a lambda with size exactly s.

    The debiased result depends only on the support, so any lambda inside
    the size-s window is as good as its largest element. If the window is
    empty (exactly tied activations) the largest size below s wins.
    """
    best = (lam_hi, fit_hi)
    while lam_hi > lam_lo * (1.0 + 1e-12):
        lam_mid = math.sqrt(lam_hi * lam_lo)
        fit_mid = solve_lasso(samples, lam_mid, cfg,
                              beta0=fit_hi.beta, alpha0=fit_hi.alpha)
        if len(fit_mid.support) <= s:
            if len(fit_mid.support) > len(best[1].support):
                best = (lam_mid, fit_mid)
            lam_hi, fit_hi = lam_mid, fit_mid
        else:
            lam_lo, fit_lo = lam_mid, fit_mid
        if len(best[1].support) == s:
            break
    return best


def lasso_path(samples: SampleSet, s: int,
               config: Optional[SolverConfig] = None, *,
               fits: Optional[List[Tuple[float, SparseFit]]] = None
               ) -> SparseFit:
    """Support selection by the Lasso path, then a debiasing refit.

    Among grid points whose support size is <= s, takes the largest lambda
    achieving the maximal such size, and refits unpenalized least squares
    on that support to remove shrinkage bias. When the grid steps over a
    narrow support-size window (activation thresholds closer than the grid
    resolution), the first straddling interval is bisected so sizes are not
    skipped. ``fits`` short-circuits the grid computation when the caller
    already holds ``lasso_path_fits`` output for these samples.
    """
    if not 0 <= s <= samples.n:
        raise InvalidSparsity(
            f"sparsity must satisfy 0 <= s <= n={samples.n}, got {s}"
        )
    cfg = config or DEFAULT_CONFIG
    if fits is None:
        fits = lasso_path_fits(samples, cfg)
    eligible = [(lam, fit) for lam, fit in fits if len(fit.support) <= s]
    best_size = max(len(fit.support) for _, fit in eligible)
    lam_sel, fit_sel = next(
        (lam, fit) for lam, fit in eligible if len(fit.support) == best_size
    )
    if best_size < s:
        straddle = next(
            ((a, b) for a, b in zip(fits, fits[1:])
             if len(a[1].support) <= s < len(b[1].support)),
            None,
        )
        if straddle is not None:
            (lam_hi, fit_hi), (lam_lo, fit_lo) = straddle
            lam_ref, fit_ref = _bisect_for_budget(
                samples, cfg, s, lam_hi, fit_hi, lam_lo, fit_lo
            )
            if len(fit_ref.support) > best_size:
                lam_sel, fit_sel = lam_ref, fit_ref
    debiased = least_squares_on_support(samples, fit_sel.support)
    return replace(
        debiased, method="lasso_path", lam=lam_sel, converged=fit_sel.converged
    )
