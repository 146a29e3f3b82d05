"""Optimal-explanation search: minimize var(yhat | u, E) over |E| <= s.

Minimizing the conditional variance is equivalent to maximizing the
conditional MI, since the numerator var(yhat|u) does not depend on the
choice of E. Two strategies: exact enumeration (n <= 25) and greedy forward
selection for larger dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionTooLarge, InvalidSparsity
from .mi import (
    FLOOR_RTOL,
    MAX_ENUMERATION_DIM,
    MiValue,
    _map_over_supports,
    conditional_mi,
    conditional_variance,
    enumerate_supports,
)
from .model import ExplanationSupport, JointMoments


@dataclass(frozen=True)
class SearchResult:
    support: ExplanationSupport
    objective: float  # var(yhat | u, support) achieved
    mi: MiValue
    method: str  # "exhaustive" or "greedy"

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "support": list(self.support.indices),
            "objective": self.objective,
            "mi_nats": "inf" if self.mi.is_infinite else self.mi.nats,
        }


def optimal_support_exhaustive(moments: JointMoments, s: int,
                               threads: int = 1) -> SearchResult:
    """Global minimum of the conditional variance over all supports of size
    <= s.

    Ties are broken toward the smaller support, then lexicographically: the
    enumeration runs in that order and only a strict improvement replaces
    the incumbent. Improvements below 1e-12 * var(yhat) count as ties, so
    round-off (e.g. every subset reaching variance ~0 when the summary
    already determines the prediction) cannot displace the empty set.

    Raises
    ------
    DimensionTooLarge
        If n exceeds the enumeration cap of 25.
    """
    if moments.n > MAX_ENUMERATION_DIM:
        raise DimensionTooLarge(
            f"exhaustive search requires n <= {MAX_ENUMERATION_DIM}, got {moments.n}"
        )
    subsets = enumerate_supports(moments.n, s)
    values = _map_over_supports(
        lambda t: conditional_variance(moments, t), subsets, threads
    )
    tie_slack = FLOOR_RTOL * moments.prediction_variance
    best_idx = 0
    for k in range(1, len(subsets)):
        if values[k] < values[best_idx] - tie_slack:
            best_idx = k
    support = ExplanationSupport(subsets[best_idx], budget=s)
    return SearchResult(
        support=support,
        objective=values[best_idx],
        mi=conditional_mi(moments, support),
        method="exhaustive",
    )


def optimal_support_greedy(moments: JointMoments, s: int) -> SearchResult:
    """Forward selection: repeatedly add the index with the largest
    conditional-variance decrease.

    Stops early once the best available decrease falls below
    1e-12 * var(yhat), so explanations are not padded with informationless
    features.
    """
    n = moments.n
    if not 0 <= s <= n:
        raise InvalidSparsity(f"sparsity must satisfy 0 <= s <= n={n}, got {s}")
    threshold = FLOOR_RTOL * moments.prediction_variance
    chosen: list = []
    current = conditional_variance(moments, ())
    while len(chosen) < s:
        best_j = None
        best_val = current
        for j in range(1, n + 1):
            if j in chosen:
                continue
            val = conditional_variance(moments, sorted(chosen + [j]))
            if val < best_val:
                best_val = val
                best_j = j
        if best_j is None or (current - best_val) < threshold:
            break
        chosen.append(best_j)
        chosen.sort()
        current = best_val
    support = ExplanationSupport(tuple(chosen), budget=s)
    return SearchResult(
        support=support,
        objective=conditional_variance(moments, support),
        mi=conditional_mi(moments, support),
        method="greedy",
    )
