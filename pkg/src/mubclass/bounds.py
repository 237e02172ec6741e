"""Closed-form class-count bound and leading-order cost models of three classifiers.

All hidden overhead factors are fixed to 1, so the estimates compare growth
rates only. Costs are kept as log10 values and converted to floats on demand.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .gf import is_prime
from .mub_core import Dimension

CSV_COLUMNS = ("d", "s", "log10_t_u", "log10_t_s", "log10_t_r")


def theorem1_bound(d: int, k: int) -> int:
    """Upper bound on the number of classes of k-subsets for odd prime d.

    1 for k in {1, d}; floor(C(d+1, k) / 2d) strictly in between.
    """
    Dimension.odd_prime(d)
    if not 1 <= k <= d:
        raise ValueError(f"k={k} out of range: the bound is defined for 1 <= k <= d={d}"
                         f" (and k=d+1 is the single full set)")
    if k in (1, d):
        return 1
    return math.comb(d + 1, k) // (2 * d)


def _log10_int(n: int) -> float:
    return math.log10(n)


def _from_log10(v: float) -> float:
    return 10.0**v if v < 308 else math.inf


@dataclass(frozen=True)
class ComplexityEstimate:
    d: int
    k: int
    s: int
    log10_t_u: float
    log10_t_s: float
    log10_t_r: float

    @property
    def t_u(self) -> float:
        return _from_log10(self.log10_t_u)

    @property
    def t_s(self) -> float:
        return _from_log10(self.log10_t_s)

    @property
    def t_r(self) -> float:
        return _from_log10(self.log10_t_r)


def complexity_estimates(d: int, k: int, s: int) -> ComplexityEstimate:
    """Operation counts for the table method (t_u), entropy grid search (t_s), robustness SDP (t_r)."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if not 1 <= k <= d + 1:
        raise ValueError(f"k={k} must lie in 1..{d + 1}")
    if s < 2:
        raise ValueError(f"sampling density s={s} must be >= 2")
    n_subsets = _log10_int(math.comb(d + 1, k))
    klogk = 1.0 if k == 1 else k * math.log2(k)
    lu = n_subsets + math.log10(d + 2) + math.log10(klogk)
    ls = n_subsets + (2 * d - 1) * math.log10(s)
    lr = n_subsets + k * math.log10(d) + math.log10(d * d - 1) + math.log10(d) + math.log10(k)
    return ComplexityEstimate(d, k, s, lu, ls, lr)


def half_k(d: int) -> int:
    return (d + 1) // 2


def odd_primes(dmin: int, dmax: int) -> list[int]:
    return [d for d in range(max(dmin, 3), dmax + 1) if is_prime(d)]


def emit_complexity_curves(d_range: Iterable[int], s_values: Sequence[int],
                           k_rule=half_k) -> list[tuple]:
    """Rows (d, s, log10 t_u, log10 t_s, log10 t_r), ordered by s then d."""
    d_range = list(d_range)
    for s in s_values:
        if s < 2:
            raise ValueError(f"sampling density s={s} must be >= 2")
    for d in d_range:
        Dimension.odd_prime(d)
    rows = []
    for s in s_values:
        for d in d_range:
            e = complexity_estimates(d, k_rule(d), s)
            rows.append((d, s, e.log10_t_u, e.log10_t_s, e.log10_t_r))
    return rows


def curves_to_csv(rows: list[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for d, s, lu, ls, lr in rows:
        w.writerow([d, s, f"{lu:.6f}", f"{ls:.6f}", f"{lr:.6f}"])
    return buf.getvalue()
