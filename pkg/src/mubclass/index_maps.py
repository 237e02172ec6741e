"""Closed-form action of the family matrices and conjugation on indices (odd prime d).

M_x sends |psi_{b,y}> to |psi_{c,z}> up to phase with

    x = d            : z = y, c = b
    y = d            : z = x, c = b
    y = 0            : z = d, c from the numeric oracle
    1 <= y <= d - 1  : z = x - 1/(4y), c = b/(2y)   (mod d)

Conjugation sends (y, b) to (-y, -b) mod d and fixes the computational basis.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .mub_core import Dimension, build_prime_mubs, match_vector


class IndexMapResult(NamedTuple):
    z: int
    c: int | None = None


def mod_inverse(a: int, d: int) -> int:
    if a % d == 0:
        raise ValueError(f"{a} is not invertible modulo {d}")
    return pow(a % d, -1, d)


def _check(d: int, **indices):
    Dimension.odd_prime(d)
    for name, value in indices.items():
        hi = d - 1 if name == "b" else d
        if not 0 <= value <= hi:
            raise ValueError(f"{name}={value} out of range 0..{hi}")


def unitary_index_map(x: int, y: int, d: int) -> int:
    _check(d, x=x, y=y)
    if x == d:
        return y
    if y == 0:
        return d
    if y == d:
        return x
    return (x - mod_inverse(4 * y, d)) % d


@lru_cache(maxsize=None)
def _oracle_vector_index(x: int, y: int, b: int, d: int) -> int:
    fam = build_prime_mubs(d)
    z, c = match_vector(fam.matrix(x) @ fam.vector(b, y), fam)
    return c


def vector_index_map(x: int, y: int, b: int, d: int) -> IndexMapResult:
    _check(d, x=x, y=y, b=b)
    z = unitary_index_map(x, y, d)
    if x == d:
        return IndexMapResult(z, b)
    if 1 <= y <= d - 1:
        return IndexMapResult(z, b * mod_inverse(2 * y, d) % d)
    return IndexMapResult(z, _oracle_vector_index(x, y, b, d))


def conj_index_map(y: int, b: int, d: int) -> IndexMapResult:
    _check(d, y=y, b=b)
    if y == d:
        return IndexMapResult(d, b)
    return IndexMapResult((-y) % d, (-b) % d)


def unitary_rows(d: int) -> np.ndarray:
    """(d+1, d+1) array; row x is the basis-index permutation induced by M_x."""
    return np.array([[unitary_index_map(x, y, d) for y in range(d + 1)]
                     for x in range(d + 1)], dtype=np.int64)


def conj_row(d: int) -> np.ndarray:
    return np.array([conj_index_map(y, 0, d).z for y in range(d + 1)], dtype=np.int64)
