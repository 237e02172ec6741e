"""Completeness-preserving relabelings of the computational basis (prime-power d).

A permutation ``perm`` acts as the matrix P with P|j> = |perm[j]>. It is
kept when P maps every basis of the family onto a basis of the family up
to per-vector phases. The surviving permutations are added as generators
next to M_0..M_d and conjugation before classifying subsets.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from itertools import permutations, product
from pathlib import Path

import numpy as np

from .gf import field as gf_field
from .mub_core import (PRIME_POWER_CAP, Dimension, MubFamily, build_prime_mubs,
                       build_prime_power_mubs)
from .orbits import OrbitPartition, classify_all
from .transform_table import ClosureViolation, TransformTable, build_table_numeric, numeric_row

log = logging.getLogger(__name__)

EXHAUSTIVE_CAP = 9
_CHUNK = 40_000


class SearchCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class PermGenerator:
    perm: tuple[int, ...]
    induced_images: tuple[int, ...]

    def matrix(self) -> np.ndarray:
        d = len(self.perm)
        P = np.zeros((d, d))
        P[list(self.perm), np.arange(d)] = 1.0
        return P


@dataclass(frozen=True)
class PermSearchResult:
    generators: tuple[PermGenerator, ...]
    mode: str  # "exhaustive" or "structured"
    candidates: int

    @property
    def order(self) -> int:
        return len(self.generators)

    @property
    def perms(self) -> list[tuple[int, ...]]:
        return [g.perm for g in self.generators]


def _inverse(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size)
    return inv


def _survivors(sigmas: np.ndarray, family: MubFamily) -> np.ndarray:
    """Filter candidates sigma (acting as v -> v[sigma]) on the first vector of each basis."""
    allv = family.all_vectors.conj().T
    tol = family.tolerance
    keep = sigmas
    for y in range(family.d):
        if keep.shape[0] == 0:
            break
        v = family.vector(0, y)
        out = []
        for start in range(0, keep.shape[0], _CHUNK):
            part = keep[start:start + _CHUNK]
            ov = np.abs(v[part] @ allv.T)
            out.append(part[ov.max(axis=1) >= 1 - tol])
        keep = np.concatenate(out)
    return keep


def _affine_candidates(p: int, n: int) -> np.ndarray:
    """All label maps j -> A j + b over GF(p)^n with A invertible."""
    F = gf_field(p, n)
    coords = F.coords  # (q, n)
    weights = p ** np.arange(n)
    out = []
    for entries in product(range(p), repeat=n * n):
        A = np.array(entries, dtype=np.int64).reshape(n, n)
        if round(np.linalg.det(A)) % p == 0:
            continue
        lin = (coords @ A.T) % p
        for b in coords:
            out.append((((lin + b) % p) @ weights))
    return np.array(out, dtype=np.int64)


def discover_permutations(family: MubFamily, exhaustive_cap: int = EXHAUSTIVE_CAP,
                          structured: bool | None = None) -> PermSearchResult:
    """All completeness-preserving permutations, sorted by one-line notation.

    Exhaustive over S_d when d <= exhaustive_cap; otherwise (or when
    ``structured`` is set) only affine maps of the label space are tried,
    which makes the result a subgroup search.
    """
    d = family.d
    if structured is None:
        structured = d > exhaustive_cap
    if not structured and d > exhaustive_cap:
        raise SearchCapExceeded(f"d={d}: exhaustive search over {d}! candidates exceeds cap"
                                f" d <= {exhaustive_cap}; use the structured search")
    if structured:
        dim = family.dimension
        sigmas = _affine_candidates(dim.p, dim.n)
        mode = "structured"
    else:
        sigmas = np.array(list(permutations(range(d))), dtype=np.int64)
        mode = "exhaustive"
    n_candidates = int(sigmas.shape[0])
    keep = _survivors(sigmas, family)
    gens = []
    for sigma in keep:
        perm = _inverse(sigma)
        gen = PermGenerator(tuple(int(v) for v in perm), ())
        try:
            row = numeric_row(family, "P", lambda m, P=gen.matrix(): P @ m)
        except ClosureViolation:
            continue
        gens.append(PermGenerator(gen.perm, row.images))
    gens.sort(key=lambda g: g.perm)
    log.info("d=%d: %d of %d candidates preserve the family (%s)", d, len(gens), n_candidates, mode)
    return PermSearchResult(tuple(gens), mode, n_candidates)


def is_group(perms) -> bool:
    """Closure of a finite permutation set under composition and inverse."""
    arr = np.array(perms, dtype=np.int64)
    keys = {row.tobytes() for row in arr}
    ident = np.arange(arr.shape[1], dtype=np.int64)
    if ident.tobytes() not in keys:
        return False
    for a in arr:
        if _inverse(a).tobytes() not in keys:
            return False
        for row in a[arr]:
            if row.tobytes() not in keys:
                return False
    return True


# ---------------------------------------------------------------- caching

def default_cache_dir() -> Path:
    env = os.environ.get("MUBCLASS_CACHE")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "mubclass"


def cache_key(family: MubFamily, mode: str) -> str:
    dim = family.dimension
    return f"p{dim.p}-n{dim.n}-{family.construction}-tol{family.tolerance:g}-{mode}"


def cached_permutations(family: MubFamily, cache_dir: Path | str | None = None,
                        **kw) -> tuple[PermSearchResult, bool]:
    """discover_permutations backed by a JSON cache; returns (result, cache_hit)."""
    cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    structured = kw.get("structured")
    if structured is None:
        structured = family.d > kw.get("exhaustive_cap", EXHAUSTIVE_CAP)
    key = cache_key(family, "structured" if structured else "exhaustive")
    path = cache_dir / f"perms-{key}.json"
    if path.exists():
        data = json.loads(path.read_text())
        if data.get("key") == key:
            gens = tuple(PermGenerator(tuple(g["perm"]), tuple(g["images"]))
                         for g in data["generators"])
            return PermSearchResult(gens, data["mode"], data["candidates"]), True
    res = discover_permutations(family, **kw)
    cache_dir.mkdir(parents=True, exist_ok=True)
    payload = {"key": key, "mode": res.mode, "candidates": res.candidates, "order": res.order,
               "generators": [{"perm": list(g.perm), "images": list(g.induced_images)}
                              for g in res.generators]}
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload))
    tmp.replace(path)
    return res, False


# ---------------------------------------------------------------- classification

def family_for(p: int, n: int, cap: int = PRIME_POWER_CAP) -> MubFamily:
    if n == 1:
        return build_prime_mubs(p)
    return build_prime_power_mubs(p, n, cap)


def extended_table(family: MubFamily, perms: PermSearchResult) -> TransformTable:
    """Rows M_0..M_d, conj, then one row per permutation (non-closing rows are excluded)."""
    extras = [g.matrix() for g in perms.generators]
    labels = [f"P_{i}" for i in range(len(extras))]
    return build_table_numeric(family, extras, labels, on_violation="skip")


def classify_prime_power(p: int, n: int, k: int, *, cap: int = PRIME_POWER_CAP,
                         cache_dir=None, use_cache: bool = False, threads: int | None = None,
                         keep_members: bool = False, **search_kw) -> OrbitPartition:
    if n >= 2:
        Dimension.prime_power(p, n, cap)
    family = family_for(p, n, cap)
    if use_cache:
        perms, _ = cached_permutations(family, cache_dir, **search_kw)
    else:
        perms = discover_permutations(family, **search_kw)
    table = extended_table(family, perms)
    return classify_all(family.d, k, table, threads=threads, keep_members=keep_members)
