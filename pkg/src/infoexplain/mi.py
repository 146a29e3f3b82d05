"""Exact conditional variance and conditional mutual information.

For jointly Gaussian (x, yhat, u) the information an explanation subset E
adds about the scalar prediction, beyond the user summary, is

    I(E; yhat | u) = 1/2 ln( var(yhat | u) / var(yhat | u, x_E) )

in nats. Both conditional variances are Schur complements of the joint
second-moment matrix, computed with a pseudoinverse so that redundant
features or a summary that is linearly dependent on the selected features
cannot crash the computation.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionTooLarge, InvalidFloor, InvalidSparsity
from .model import ExplanationSupport, JointMoments, SupportLike, as_support

# Relative spectral cutoff for pseudoinverting the conditioning covariance.
PINV_RTOL = 1e-10

# Default variance floor, relative to var(yhat): below it the prediction is
# treated as determined by the conditioning variables.
FLOOR_RTOL = 1e-12

# Exhaustive enumeration cap; beyond this use greedy search or the Lasso path.
MAX_ENUMERATION_DIM = 25


@dataclass(frozen=True)
class MiValue:
    """Conditional MI in nats together with the two variances it compares.

    ``nats`` is ``math.inf`` when the explanation makes the prediction
    deterministic (the conditional variance falls below the floor).
    """

    nats: float
    numerator_var: float
    denominator_var: float

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.nats)


def conditional_variance(moments: JointMoments, support: SupportLike = ()) -> float:
    """Variance of yhat after conditioning on u and the support features.

    Computes var(yhat) - c G^+ c^T where G is the covariance of the
    conditioning vector (u, x_i for i in support) and c the cross-covariance
    row with yhat. G^+ is a pseudoinverse with relative spectral cutoff
    1e-10, so singular conditioning blocks are handled; the result is
    clamped to [0, inf).
    """
    sup = as_support(support, n=moments.n)
    sigma = moments.sigma
    cond = [moments.u_index] + [i - 1 for i in sup.indices]
    var_y = sigma[moments.yhat_index, moments.yhat_index]
    c = sigma[moments.yhat_index, cond]
    g = sigma[np.ix_(cond, cond)]
    g_pinv = np.linalg.pinv(g, rcond=PINV_RTOL, hermitian=True)
    return float(max(var_y - c @ g_pinv @ c, 0.0))


def conditional_mi(moments: JointMoments, support: SupportLike = (),
                   floor: Optional[float] = None) -> MiValue:
    """Conditional MI between the support features and yhat, given u.

    ``floor`` guards the differential-entropy degeneracies: when
    var(yhat|u) is already at or below the floor the summary determines the
    prediction and the MI is 0; when var(yhat|u,E) falls to the floor the
    explanation determines the prediction and the MI is reported as +inf.
    Defaults to 1e-12 * var(yhat).

    Raises
    ------
    InvalidFloor
        If an explicit floor is not strictly positive.
    """
    if floor is not None and floor <= 0:
        raise InvalidFloor(f"variance floor must be > 0, got {floor}")
    f = floor if floor is not None else FLOOR_RTOL * moments.prediction_variance
    num = conditional_variance(moments, ())
    den = conditional_variance(moments, support)
    if num <= f:
        nats = 0.0
    elif den <= f:
        nats = math.inf
    else:
        nats = max(0.5 * math.log(num / den), 0.0)
    return MiValue(nats=nats, numerator_var=num, denominator_var=den)


def enumerate_supports(n: int, s: int) -> List[Tuple[int, ...]]:
    """All 1-based index subsets of size <= s, ordered by size then
    lexicographically."""
    if not 0 <= s <= n:
        raise InvalidSparsity(f"sparsity must satisfy 0 <= s <= n={n}, got {s}")
    out: List[Tuple[int, ...]] = []
    for size in range(s + 1):
        out.extend(itertools.combinations(range(1, n + 1), size))
    return out


def _map_over_supports(fn: Callable, subsets: Sequence[Tuple[int, ...]],
                       threads: int) -> list:
    """Evaluate fn on every subset, optionally across a thread pool.

    Results are returned in the order of ``subsets`` regardless of thread
    count, so downstream reductions are deterministic.
    """
    if threads <= 1 or len(subsets) < 64:
        return [fn(t) for t in subsets]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, subsets, chunksize=max(1, len(subsets) // (threads * 4))))


def mi_table(moments: JointMoments, s: int, floor: Optional[float] = None,
             threads: int = 1) -> List[Tuple[ExplanationSupport, MiValue]]:
    """Conditional MI for every support of size <= s.

    Entries are ordered by decreasing nats, ties broken by lexicographically
    smallest support (so outputs are stable for golden tests). Enumeration is
    capped at n <= 25.

    Raises
    ------
    DimensionTooLarge
        If ``moments.n`` exceeds the enumeration cap.
    """
    if moments.n > MAX_ENUMERATION_DIM:
        raise DimensionTooLarge(
            f"mi_table enumerates subsets only for n <= {MAX_ENUMERATION_DIM}, "
            f"got n={moments.n}"
        )
    subsets = enumerate_supports(moments.n, s)
    values = _map_over_supports(
        lambda t: conditional_mi(moments, t, floor=floor), subsets, threads
    )
    entries = [(ExplanationSupport(t, budget=s), mi)
               for t, mi in zip(subsets, values)]
    entries.sort(key=lambda e: (-e[1].nats, e[0].indices))
    return entries


def mi_table_rows(entries: Sequence[Tuple[ExplanationSupport, MiValue]]):
    """CSV-ready rows for an MI table: columns support, mi_nats, cond_var.

    The support cell joins 1-based indices with semicolons (empty string for
    the empty set); infinite MI is spelled ``inf``.
    """
    rows = [("support", "mi_nats", "cond_var")]
    for sup, mi in entries:
        cell = ";".join(str(i) for i in sup.indices)
        nats = "inf" if mi.is_infinite else f"{mi.nats:.17g}"
        rows.append((cell, nats, f"{mi.denominator_var:.17g}"))
    return rows
