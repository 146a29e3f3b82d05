"""One-call selection of the optimal explanation support.

``explain_from_samples`` is the empirical algorithm: feed it rows of
(features, prediction, user summary) and a sparsity budget, get back the
index set of the fitted sparse coefficients. ``explain_population`` solves
the same problem exactly from a known Gaussian model and is the natural
oracle for the empirical path.
"""

from __future__ import annotations

from typing import Optional

from .errors import DimensionTooLarge, InvalidSparsity
from .mi import MAX_ENUMERATION_DIM
from .model import ExplanationSupport, GaussianModel, SampleSet, analytic_moments
from .regression import SolverConfig, SparseFit, lasso_path, solve_l0
from .search import optimal_support_exhaustive

METHODS = ("l0_exhaustive", "omp", "lasso_path")

# Exact where affordable, convex relaxation otherwise.
DEFAULT_METHOD_DIM_CAP = 15


def default_method(n: int) -> str:
    return "l0_exhaustive" if n <= DEFAULT_METHOD_DIM_CAP else "lasso_path"


def explain_fit(samples: SampleSet, s: int, method: Optional[str] = None,
                config: Optional[SolverConfig] = None) -> SparseFit:
    """Run the selected sparse solver and return the full fit."""
    method = method or default_method(samples.n)
    if method == "l0_exhaustive":
        return solve_l0(samples, s, strategy="exhaustive")
    if method == "omp":
        return solve_l0(samples, s, strategy="omp")
    if method == "lasso_path":
        return lasso_path(samples, s, config)
    raise InvalidSparsity(f"unknown method {method!r}; expected one of {METHODS}")


def explain_from_samples(samples: SampleSet, s: int,
                         method: Optional[str] = None,
                         config: Optional[SolverConfig] = None
                         ) -> ExplanationSupport:
    """Select at most s features to explain the prediction, from samples.

    The support is the nonzero set of the fitted sparse regression of yhat
    on (u, x). ``method`` is one of ``l0_exhaustive``, ``omp``,
    ``lasso_path``; by default exhaustive search for n <= 15 and the Lasso
    path beyond.
    """
    if not 0 <= s <= samples.n:
        raise InvalidSparsity(
            f"sparsity must satisfy 0 <= s <= n={samples.n}, got {s}"
        )
    fit = explain_fit(samples, s, method, config)
    return ExplanationSupport(fit.support, budget=s)


def explain_population(model: GaussianModel, s: int) -> ExplanationSupport:
    """Exact optimal support from the model itself (no samples).

    Equals the exhaustive conditional-variance minimizer on the analytic
    moments; requires n <= 25.
    """
    if model.n > MAX_ENUMERATION_DIM:
        raise DimensionTooLarge(
            f"population search requires n <= {MAX_ENUMERATION_DIM}, got {model.n}"
        )
    return optimal_support_exhaustive(analytic_moments(model), s).support
