"""Complete families of mutually unbiased bases and vector matching.

A family is stored as an array ``bases`` of shape (d+1, d, d); ``bases[x]``
is the matrix M_x whose column ``a`` is the basis vector |psi_{a,x}>.
Index d is always the computational basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gf import GF, field as gf_field, is_prime, prime_power

TOL = 1e-9
PRIME_POWER_CAP = 16
CONSTRUCTION_ID = "gf-trace-v1"


class DimensionError(ValueError):
    """A dimension (or prime/exponent pair) violates a precondition."""


@dataclass(frozen=True)
class Dimension:
    d: int
    kind: str  # "odd-prime" or "prime-power"
    p: int
    n: int = 1

    @classmethod
    def odd_prime(cls, d: int) -> "Dimension":
        if not isinstance(d, (int, np.integer)):
            raise DimensionError(f"dimension must be an integer, got {d!r}")
        d = int(d)
        if d < 3:
            raise DimensionError(f"d={d}: dimension must be an odd prime >= 3")
        if d % 2 == 0:
            raise DimensionError(f"d={d}: dimension must be odd (inverse of 2 mod d needed)")
        if not is_prime(d):
            raise DimensionError(f"d={d}: dimension is not prime")
        return cls(d, "odd-prime", d, 1)

    @classmethod
    def prime_power(cls, p: int, n: int, cap: int = PRIME_POWER_CAP) -> "Dimension":
        if not is_prime(p):
            raise DimensionError(f"p={p} is not prime")
        if n < 2:
            raise DimensionError(f"n={n}: prime-power construction needs n >= 2")
        if p**n > cap:
            raise DimensionError(f"d={p}^{n}={p**n} exceeds the prime-power cap {cap}")
        return cls(p**n, "prime-power", p, n)

    @classmethod
    def parse(cls, d: int, cap: int = PRIME_POWER_CAP) -> "Dimension":
        """Classify an integer dimension; d=2 and non prime powers are rejected."""
        pp = prime_power(d)
        if pp is None:
            raise DimensionError(f"{d} is not a prime power")
        p, n = pp
        if n == 1:
            return cls.odd_prime(d)
        return cls.prime_power(p, n, cap)


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    max_deviation: float
    orthonormality_deviation: float
    unbiasedness_deviation: float
    failures: tuple = ()

    def __bool__(self):
        return self.passed


@dataclass(frozen=True, eq=False)
class MubFamily:
    dimension: Dimension
    bases: np.ndarray
    tolerance: float = TOL
    construction: str = CONSTRUCTION_ID
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.bases.setflags(write=False)

    @property
    def d(self) -> int:
        return self.dimension.d

    def vector(self, a: int, x: int) -> np.ndarray:
        """|psi_{a,x}>"""
        return self.bases[x][:, a]

    def matrix(self, x: int) -> np.ndarray:
        return self.bases[x]

    @property
    def all_vectors(self) -> np.ndarray:
        """(d, (d+1)*d) matrix; column x*d + a is |psi_{a,x}>."""
        d = self.d
        return np.transpose(self.bases, (1, 0, 2)).reshape(d, (d + 1) * d)


def _omega_powers(d: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(d) / d)


def build_prime_mubs(d: int, tolerance: float = TOL) -> MubFamily:
    """Quadratic-phase family psi_{a,x}(j) = w^(x j^2 - a j)/sqrt(d) plus the computational basis."""
    dim = Dimension.odd_prime(d)
    w = _omega_powers(d)
    j = np.arange(d)
    x = np.arange(d)[:, None, None]
    a = np.arange(d)[None, None, :]
    expo = (x * (j * j)[None, :, None] - a * j[None, :, None]) % d
    bases = np.empty((d + 1, d, d), dtype=complex)
    bases[:d] = w[expo] / np.sqrt(d)
    bases[d] = np.eye(d)
    return MubFamily(dim, bases, tolerance, construction="quadratic-phase")


def build_prime_power_mubs(p: int, n: int, cap: int = PRIME_POWER_CAP,
                           tolerance: float = TOL) -> MubFamily:
    """Galois-field family for d = p^n, n >= 2.

    Odd p:  psi_{b,x}(j) = w_p^{tr(x j^2 - b j)} / sqrt(d).
    p = 2:  psi_{b,x}(j) = i^{Q_x(j)} (-1)^{tr(b j)} / sqrt(d), where
            Q_x(j) = j^T S_x j evaluated over the integers mod 4 and
            S_x[u, v] = tr(x e_u e_v) in the polynomial basis e_u.
    Labels x, b, j are field-element labels (see gf.GF).
    """
    dim = Dimension.prime_power(p, n, cap)
    F: GF = gf_field(p, n)
    q = F.q
    mul, add, neg, tr = F.mul_table, F.add_table, F.neg_table, F.trace_table
    bases = np.empty((q + 1, q, q), dtype=complex)
    j = np.arange(q)
    jsq = mul[j, j]
    if p != 2:
        w = _omega_powers(p)
        for x in range(q):
            xq = mul[x, jsq]  # x j^2 over j
            bj = mul[np.arange(q)[None, :], j[:, None]]  # [j, b] -> b*j
            expo = tr[add[xq[:, None], neg[bj]]]
            bases[x] = w[expo] / np.sqrt(q)
    else:
        basis_elems = [p**u for u in range(n)]  # labels of 1, t, t^2, ...
        bits = F.coords  # (q, n) 0/1
        for x in range(q):
            S = np.array([[tr[mul[x, mul[eu, ev]]] for ev in basis_elems]
                          for eu in basis_elems], dtype=np.int64)
            Q = np.einsum("ju,uv,jv->j", bits, S, bits) % 4
            lin = tr[mul[np.arange(q)[None, :], j[:, None]]]  # [j, b]
            bases[x] = (1j ** Q)[:, None] * (-1.0) ** lin / np.sqrt(q)
    bases[q] = np.eye(q)
    fam = MubFamily(dim, bases, tolerance, meta={"modulus": list(F.modulus)})
    return fam


def build_family(d: int, cap: int = PRIME_POWER_CAP, tolerance: float = TOL) -> MubFamily:
    dim = Dimension.parse(d, cap)
    if dim.kind == "odd-prime":
        return build_prime_mubs(d, tolerance)
    return build_prime_power_mubs(dim.p, dim.n, cap, tolerance)


def check_unbiased(family: MubFamily) -> ValidationReport:
    d = family.d
    B = family.bases
    eye = np.eye(d)
    failures = []
    ortho = 0.0
    unb = 0.0
    for x in range(d + 1):
        dev = float(np.max(np.abs(B[x].conj().T @ B[x] - eye)))
        ortho = max(ortho, dev)
        if dev > family.tolerance:
            failures.append(("orthonormality", x, dev))
    for x in range(d + 1):
        for y in range(x + 1, d + 1):
            ov = np.abs(B[x].conj().T @ B[y]) ** 2
            dev = float(np.max(np.abs(ov - 1.0 / d)))
            unb = max(unb, dev)
            if dev > family.tolerance:
                failures.append(("unbiasedness", (x, y), dev))
    worst = max(ortho, unb)
    return ValidationReport(not failures, worst, ortho, unb, tuple(failures))


def match_vector(v, family: MubFamily) -> tuple[int, int] | None:
    """Return (basis index, vector index) of the family member equal to v up to phase."""
    v = np.asarray(v, dtype=complex)
    if v.shape != (family.d,):
        raise ValueError(f"expected a vector of length {family.d}, got shape {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) > family.tolerance:
        raise ValueError("input vector is not normalized")
    ov = np.abs(family.all_vectors.conj().T @ v)
    i = int(np.argmax(ov))
    if ov[i] < 1.0 - family.tolerance:
        return None
    return divmod(i, family.d)


def match_columns(vectors: np.ndarray, family: MubFamily):
    """Vectorized match of the columns of a (d, m) array.

    Returns (z, c) integer arrays; entries are -1 where nothing matches.
    """
    ov = np.abs(family.all_vectors.conj().T @ vectors)
    idx = np.argmax(ov, axis=0)
    ok = ov[idx, np.arange(ov.shape[1])] >= 1.0 - family.tolerance
    z, c = np.divmod(idx, family.d)
    z = np.where(ok, z, -1)
    c = np.where(ok, c, -1)
    return z, c
