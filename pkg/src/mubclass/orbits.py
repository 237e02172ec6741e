"""Equivalence classes of k-subsets of basis indices under a transformation table.

The classes are the orbits of the permutation group generated by the table
rows. ``orbit_closure`` is the direct breadth-first search over rows;
``classify_all`` sweeps ranks in lexicographic order and expands each new
seed through the full list of group elements, which yields the same orbits
with one vectorized pass per class.
"""

from __future__ import annotations

import logging
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb
from typing import Iterable

import numpy as np

from .subsets import RankBitset, canonical, lex_rank, lex_unrank
from .transform_table import TransformTable

log = logging.getLogger(__name__)

ENUMERATION_CAP = 2**31
MEMBER_LIMIT = 10**6


class ResourceGuardError(RuntimeError):
    """Refusal to enumerate a subset space larger than the configured cap."""


@dataclass(frozen=True)
class OrbitClass:
    representative: tuple[int, ...]
    size: int
    members: tuple[tuple[int, ...], ...] | None = None

    def to_dict(self, with_members: bool = True) -> dict:
        out = {"representative": list(self.representative), "size": self.size}
        if with_members and self.members is not None:
            out["members"] = [list(m) for m in self.members]
        return out


@dataclass(frozen=True)
class OrbitPartition:
    d: int
    k: int
    classes: tuple[OrbitClass, ...]
    group_order: int

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def total(self) -> int:
        return sum(c.size for c in self.classes)

    @property
    def representatives(self) -> list[tuple[int, ...]]:
        return [c.representative for c in self.classes]

    def class_of(self, s) -> int:
        s = canonical(s)
        for i, c in enumerate(self.classes):
            if c.members is None:
                raise ValueError("partition was built without member lists")
            if s in c.members:
                return i
        raise KeyError(s)

    def to_dict(self, with_members: bool = True) -> dict:
        return {
            "d": self.d,
            "k": self.k,
            "classes": self.n_classes,
            "total": self.total,
            "group_order": self.group_order,
            "representatives": [list(r) for r in self.representatives],
            "sizes": [c.size for c in self.classes],
            "partition": [c.to_dict(with_members) for c in self.classes],
        }


def _rows(table) -> np.ndarray:
    if isinstance(table, TransformTable):
        return table.array()
    return np.asarray(table, dtype=np.int64)


def apply_generator(row, s) -> tuple[int, ...]:
    return tuple(sorted(int(row[i]) for i in s))


def orbit_closure(s, table) -> set[tuple[int, ...]]:
    rows = [tuple(int(v) for v in r) for r in _rows(table)]
    start = canonical(s)
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for r in rows:
            img = apply_generator(r, cur)
            if img not in seen:
                seen.add(img)
                queue.append(img)
    return seen


def _closure(gens: list[np.ndarray], n: int) -> np.ndarray:
    ident = np.arange(n, dtype=np.uint8)
    seen = {ident.tobytes()}
    elems = [ident]
    frontier = ident[None, :]
    while frontier.shape[0]:
        new = []
        for g in gens:
            prod = g[frontier]  # g after f
            for row in prod:
                key = row.tobytes()
                if key not in seen:
                    seen.add(key)
                    new.append(row)
        elems.extend(new)
        frontier = np.array(new, dtype=np.uint8).reshape(-1, n)
    return np.array(elems, dtype=np.uint8)


def permutation_group(table) -> np.ndarray:
    """All elements of the group generated by the rows, as a (|G|, n) uint8 array.

    Rows already inside the group generated by earlier rows are dropped
    before the final closure.
    """
    rows = _rows(table)
    n = rows.shape[1]
    if n > 255:
        raise ValueError("ground set too large for uint8 permutations")
    gens: list[np.ndarray] = []
    group = {np.arange(n, dtype=np.uint8).tobytes()}
    elems = None
    for r in rows.astype(np.uint8):
        if r.tobytes() in group:
            continue
        gens.append(r)
        elems = _closure(gens, n)
        group = {e.tobytes() for e in elems}
    if elems is None:
        elems = np.arange(n, dtype=np.uint8)[None, :]
    return elems


def group_order(table) -> int:
    return int(permutation_group(table).shape[0])


def _default_threads() -> int:
    env = os.environ.get("MUBCLASS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _orbit_ranks(G: np.ndarray, seed: tuple[int, ...], n: int, pool, nchunks: int):
    idx = np.asarray(seed, dtype=np.int64)

    def work(part):
        imgs = np.sort(part[:, idx], axis=1).astype(np.int64)
        return imgs, lex_rank(imgs, n)

    if pool is None or nchunks == 1:
        imgs, ranks = work(G)
    else:
        parts = list(pool.map(work, np.array_split(G, nchunks)))
        imgs = np.concatenate([p[0] for p in parts])
        ranks = np.concatenate([p[1] for p in parts])
    uniq, first = np.unique(ranks, return_index=True)
    return uniq, imgs[first]


def classify_all(d: int, k: int, table, *, threads: int | None = None,
                 keep_members: bool = False, member_limit: int = MEMBER_LIMIT,
                 cap: int = ENUMERATION_CAP) -> OrbitPartition:
    """Partition all C(d+1, k) subsets into orbits; representatives are lex-minimal."""
    n = d + 1
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must lie in 1..{n}")
    rows = _rows(table)
    if rows.shape[1] != n:
        raise ValueError(f"table width {rows.shape[1]} does not match d+1={n}")
    total = comb(n, k)
    if total > cap:
        raise ResourceGuardError(
            f"C({n},{k}) = {total} subsets exceeds the enumeration cap {cap}")
    G = permutation_group(rows)
    threads = threads or _default_threads()
    nchunks = min(threads, max(1, G.shape[0] // 4096))
    store = keep_members and total <= member_limit
    visited = RankBitset(total)
    classes = []
    covered = 0
    pool = ThreadPoolExecutor(threads) if nchunks > 1 else None
    try:
        while covered < total:
            r = visited.next_clear()
            seed = lex_unrank(r, n, k)
            ranks, imgs = _orbit_ranks(G, seed, n, pool, nchunks)
            assert ranks[0] == r, "seed is not the lex-min member of its orbit"
            visited.mark(ranks)
            covered += ranks.size
            members = tuple(tuple(int(v) for v in m) for m in imgs) if store else None
            classes.append(OrbitClass(seed, int(ranks.size), members))
    finally:
        if pool is not None:
            pool.shutdown()
    log.debug("d=%d k=%d: %d classes, |G|=%d", d, k, len(classes), G.shape[0])
    return OrbitPartition(d, k, tuple(classes), int(G.shape[0]))


def class_counts(d: int, table, ks: Iterable[int] | None = None, **kw) -> dict[int, int]:
    ks = range(1, d + 2) if ks is None else ks
    return {k: classify_all(d, k, table, **kw).n_classes for k in ks}
