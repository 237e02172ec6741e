"""Small Galois field GF(p^n) with table-driven arithmetic.

Elements are integer labels 0..q-1. The label of a polynomial
c_0 + c_1 t + ... + c_{n-1} t^{n-1} is sum(c_i * p**i), so the base-p
digits of a label are its coordinates in the polynomial basis. Addition
is therefore digit-wise mod p, and label 0 / 1 are the field's zero / one.
"""

from __future__ import annotations

from functools import cached_property, lru_cache
from itertools import product

import numpy as np

# Moduli used for the fields that matter most; any other (p, n) falls back
# to the first monic irreducible in lexicographic coefficient order, which
# coincides with these entries anyway.
DEFAULT_MODULI = {
    (2, 2): (1, 1, 1),  # t^2 + t + 1
    (2, 3): (1, 1, 0, 1),  # t^3 + t + 1
    (2, 4): (1, 1, 0, 0, 1),  # t^4 + t + 1
    (3, 2): (1, 0, 1),  # t^2 + 1
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(d: int) -> tuple[int, int] | None:
    """Return (p, n) with d == p**n, or None when d is not a prime power."""
    if d < 2:
        return None
    for p in range(2, d + 1):
        if d % p == 0:
            if not is_prime(p):
                return None
            n, m = 0, d
            while m % p == 0:
                m //= p
                n += 1
            return (p, n) if m == 1 else None
    return None


def _poly_mod(a: list[int], m: tuple[int, ...], p: int) -> list[int]:
    a = [c % p for c in a]
    deg = len(m) - 1
    for i in range(len(a) - 1, deg - 1, -1):
        c = a[i]
        if c:
            for j in range(deg + 1):
                a[i - deg + j] = (a[i - deg + j] - c * m[j]) % p
    return (a + [0] * deg)[:deg]


def _is_irreducible(m: tuple[int, ...], p: int) -> bool:
    # Brute force: no monic factor of degree 1..deg//2. Fine for tiny fields.
    deg = len(m) - 1
    for fdeg in range(1, deg // 2 + 1):
        for coeffs in product(range(p), repeat=fdeg):
            f = list(coeffs) + [1]
            # long division of m by f
            r = list(m)
            for i in range(len(r) - 1, fdeg - 1, -1):
                c = r[i]
                if c:
                    for j in range(fdeg + 1):
                        r[i - fdeg + j] = (r[i - fdeg + j] - c * f[j]) % p
            if not any(r[:fdeg]):
                return False
    return True


def find_irreducible(p: int, n: int) -> tuple[int, ...]:
    if (p, n) in DEFAULT_MODULI:
        return DEFAULT_MODULI[(p, n)]
    for coeffs in product(range(p), repeat=n):
        m = tuple(reversed(coeffs)) + (1,)
        # search in lexicographic order of (c_{n-1}, ..., c_0)
        if m[0] != 0 and _is_irreducible(m, p):
            return m
    raise ValueError(f"no irreducible polynomial of degree {n} over GF({p})")


class GF:
    """The field GF(p^n) with precomputed addition and multiplication tables."""

    def __init__(self, p: int, n: int = 1, modulus: tuple[int, ...] | None = None):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if n < 1:
            raise ValueError("extension degree must be >= 1")
        self.p = p
        self.n = n
        self.q = p**n
        self.modulus = tuple(modulus) if modulus is not None else (
            find_irreducible(p, n) if n > 1 else (0, 1))
        if n > 1 and not _is_irreducible(self.modulus, p):
            raise ValueError(f"modulus {self.modulus} is reducible over GF({p})")

    def __repr__(self):
        return f"GF({self.p}^{self.n})"

    def digits(self, a: int) -> list[int]:
        return [(a // self.p**i) % self.p for i in range(self.n)]

    def label(self, digits) -> int:
        return sum(int(c) % self.p * self.p**i for i, c in enumerate(digits))

    @cached_property
    def coords(self) -> np.ndarray:
        """(q, n) array of base-p digits of every label."""
        return np.array([self.digits(a) for a in range(self.q)], dtype=np.int64)

    @cached_property
    def add_table(self) -> np.ndarray:
        c = self.coords
        s = (c[:, None, :] + c[None, :, :]) % self.p
        return (s * self.p ** np.arange(self.n)).sum(axis=2)

    @cached_property
    def neg_table(self) -> np.ndarray:
        return ((-self.coords) % self.p * self.p ** np.arange(self.n)).sum(axis=1)

    @cached_property
    def mul_table(self) -> np.ndarray:
        q = self.q
        t = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            da = self.digits(a)
            for b in range(a, q):
                db = self.digits(b)
                prod = [0] * (2 * self.n - 1)
                for i, x in enumerate(da):
                    if x:
                        for j, y in enumerate(db):
                            prod[i + j] += x * y
                r = self.label(_poly_mod(prod, self.modulus, self.p))
                t[a, b] = t[b, a] = r
        return t

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def pow(self, a: int, e: int) -> int:
        r = 1
        for _ in range(e):
            r = self.mul(r, a)
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(np.flatnonzero(self.mul_table[a] == 1)[0])

    @cached_property
    def trace_table(self) -> np.ndarray:
        """Absolute trace a + a^p + ... + a^(p^(n-1)) as an integer in 0..p-1."""
        out = np.zeros(self.q, dtype=np.int64)
        for a in range(self.q):
            s, x = 0, a
            for _ in range(self.n):
                s = self.add(s, x)
                x = self.pow(x, self.p)
            if s >= self.p:
                raise ArithmeticError("trace left the prime subfield")
            out[a] = s
        return out


@lru_cache(maxsize=None)
def field(p: int, n: int) -> GF:
    return GF(p, n)
