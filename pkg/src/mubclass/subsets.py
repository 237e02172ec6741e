"""k-subsets of {0..n-1}: lexicographic ranking via the combinatorial number system, bitmasks."""

from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np


@lru_cache(maxsize=None)
def binom_table(n: int, k: int) -> np.ndarray:
    """B[a, b] = C(a, b) for 0 <= a <= n, 0 <= b <= k (int64)."""
    B = np.zeros((n + 1, k + 1), dtype=np.int64)
    for a in range(n + 1):
        for b in range(min(a, k) + 1):
            B[a, b] = comb(a, b)
    B.setflags(write=False)
    return B


def lex_rank(subsets: np.ndarray, n: int) -> np.ndarray:
    """Lexicographic ranks of the rows of a sorted (m, k) array.

    Reflecting i -> n-1-i turns lex order into reverse colex order, and the
    colex rank of an ascending tuple e is sum_i C(e_i, i+1).
    """
    subsets = np.asarray(subsets)
    m, k = subsets.shape
    B = binom_table(n, k)
    e = (n - 1) - subsets[:, ::-1]
    colex = B[e, np.arange(1, k + 1)].sum(axis=1)
    return B[n, k] - 1 - colex


def lex_rank_one(s, n: int) -> int:
    s = tuple(s)
    return int(lex_rank(np.array([s], dtype=np.int64), n)[0])


def lex_unrank(r: int, n: int, k: int) -> tuple[int, ...]:
    total = comb(n, k)
    if not 0 <= r < total:
        raise ValueError(f"rank {r} out of range for C({n},{k})")
    colex = total - 1 - r
    e = []
    c = n - 1
    for i in range(k, 0, -1):
        while comb(c, i) > colex:
            c -= 1
        e.append(c)
        colex -= comb(c, i)
        c -= 1
    return tuple(sorted(n - 1 - x for x in e))


def to_mask(s) -> int:
    m = 0
    for i in s:
        m |= 1 << int(i)
    return m


def from_mask(m: int) -> tuple[int, ...]:
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return tuple(out)


def canonical(s) -> tuple[int, ...]:
    t = tuple(sorted(int(i) for i in s))
    if len(set(t)) != len(t):
        raise ValueError(f"subset {s} has repeated indices")
    return t


class RankBitset:
    """Visited flags over ranks 0..size-1, eight per byte."""

    CHUNK = 1 << 16

    def __init__(self, size: int):
        self.size = size
        nbytes = (size + 7) // 8
        self.bits = np.zeros(nbytes, dtype=np.uint8)
        pad = nbytes * 8 - size
        if pad:
            self.bits[-1] = (0xFF << (8 - pad)) & 0xFF
        self._ptr = 0

    def mark(self, ranks: np.ndarray) -> None:
        """Set the flags of an ascending array of distinct ranks."""
        if ranks.size == 0:
            return
        byte = ranks >> 3
        bit = np.left_shift(1, ranks & 7).astype(np.uint8)
        ub, start = np.unique(byte, return_index=True)
        self.bits[ub] |= np.bitwise_or.reduceat(bit, start)

    def __contains__(self, r: int) -> bool:
        return bool(self.bits[r >> 3] >> (r & 7) & 1)

    def next_clear(self) -> int | None:
        """Smallest rank not yet marked, or None."""
        bits = self.bits
        ptr = self._ptr
        while ptr < bits.size:
            nz = np.flatnonzero(bits[ptr:ptr + self.CHUNK] != 0xFF)
            if nz.size:
                ptr += int(nz[0])
                self._ptr = ptr
                b = int(bits[ptr])
                return ptr * 8 + ((~b & (b + 1)).bit_length() - 1)
            ptr += self.CHUNK
        self._ptr = ptr
        return None
