"""Minimal Shannon-entropy sums over pure states, used as a class separator.

For a subset S of bases the quantity is

    min_psi  sum_{x in S} H(p_x),   p_x(a) = |<psi_{a,x}|psi>|^2,

with H in bits. Equivalent subsets share the same minimum, so clusters of
distinct minima give a lower bound on the number of classes.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import minimize

from .mub_core import MubFamily
from .subsets import canonical

log = logging.getLogger(__name__)

LOG_BASE = 2
ENTROPY_CAP = 5000
_P_FLOOR = 1e-300


@dataclass(frozen=True)
class StateParams:
    alphas: tuple[float, ...]  # d-1 hyperspherical angles in [-pi, pi]
    phis: tuple[float, ...]  # d phases in [0, 2 pi)

    def __post_init__(self):
        if len(self.phis) != len(self.alphas) + 1:
            raise ValueError("need d-1 alphas and d phis")

    @property
    def d(self) -> int:
        return len(self.phis)

    @classmethod
    def from_vector(cls, theta, d: int) -> "StateParams":
        theta = np.asarray(theta, dtype=float)
        alphas = (theta[:d - 1] + np.pi) % (2 * np.pi) - np.pi
        phis = theta[d - 1:] % (2 * np.pi)
        return cls(tuple(alphas.tolist()), tuple(phis.tolist()))

    def vector(self) -> np.ndarray:
        return np.concatenate([self.alphas, self.phis])


def _amplitudes(alphas: np.ndarray) -> np.ndarray:
    d = len(alphas) + 1
    c = np.cos(alphas / 2)
    s = np.sin(alphas / 2)
    prefix = np.concatenate([[1.0], np.cumprod(s)])  # prefix[m] = prod_{l<m} sin
    r = np.empty(d)
    r[:d - 1] = prefix[:d - 1] * c
    r[d - 1] = prefix[d - 1]
    return r


def state_from_params(p: StateParams | np.ndarray, d: int | None = None) -> np.ndarray:
    """Unit vector with moduli from the hypersphere map and phases e^{i phi_n}.

    r_0 = cos(a_1/2), r_m = sin(a_1/2)...sin(a_m/2) cos(a_{m+1}/2),
    r_{d-1} = sin(a_1/2)...sin(a_{d-1}/2).
    """
    if isinstance(p, StateParams):
        alphas, phis = np.asarray(p.alphas, float), np.asarray(p.phis, float)
    else:
        theta = np.asarray(p, dtype=float)
        d = d if d is not None else (len(theta) + 1) // 2
        alphas, phis = theta[:d - 1], theta[d - 1:]
    return _amplitudes(alphas) * np.exp(1j * phis)


def _state_jacobian(theta: np.ndarray, d: int):
    """psi and d psi / d theta, shape (d, 2d-1)."""
    alphas, phis = theta[:d - 1], theta[d - 1:]
    phase = np.exp(1j * phis)
    c = np.cos(alphas / 2)
    s = np.sin(alphas / 2)
    r = _amplitudes(alphas)
    tail = np.append(c, 1.0)  # last factor of r_m
    # seg[i, j] = prod s[i:j] for j >= i (empty product 1), no divisions by sin
    m = d - 1
    S = np.where(np.arange(m)[None, :] >= np.arange(m)[:, None], s[None, :], 1.0)
    seg = np.ones((d, d))
    seg[:m, 1:] = np.cumprod(S, axis=1)
    seg = np.triu(seg) + np.tril(np.ones((d, d)), -1)
    pre = seg[0]  # pre[l] = prod s[:l]
    L = np.arange(m)[None, :]
    M = np.arange(d)[:, None]
    # l < m: r_m = pre[l] * sin_l * seg[l+1, m] * tail[m]
    lt = pre[None, :m] * (0.5 * c)[None, :] * seg[np.minimum(L + 1, m), M] * tail[:, None]
    dr = np.where(M > L, lt, 0.0)
    dr[np.arange(m), np.arange(m)] = pre[:m] * (-0.5 * s)
    J = np.zeros((d, 2 * d - 1), dtype=complex)
    J[:, :m] = dr * phase[:, None]
    psi = r * phase
    J[np.arange(d), d - 1 + np.arange(d)] = 1j * psi
    return psi, J


def _shannon_bits(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def _stacked_adjoint(subset, family: MubFamily) -> np.ndarray:
    return np.concatenate([family.matrix(x).conj().T for x in subset], axis=0)


def entropy_sum(psi, subset, family: MubFamily) -> float:
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1) > 1e-9:
        raise ValueError("state is not normalized")
    A = _stacked_adjoint(canonical(subset), family)
    probs = np.abs(A @ psi) ** 2
    return sum(_shannon_bits(probs[i * family.d:(i + 1) * family.d])
               for i in range(len(subset)))


class _Objective:
    def __init__(self, subset, family: MubFamily):
        self.d = family.d
        self.A = _stacked_adjoint(subset, family)

    def value(self, theta) -> float:
        u = self.A @ state_from_params(theta, self.d)
        p = np.maximum(np.abs(u) ** 2, _P_FLOOR)
        return float(-(p * np.log2(p)).sum())

    def value_and_grad(self, theta):
        psi, J = _state_jacobian(np.asarray(theta, float), self.d)
        u = self.A @ psi
        p = np.maximum(np.abs(u) ** 2, _P_FLOOR)
        lp = np.log2(p)
        f = -(p * lp).sum()
        dh = -(lp + 1 / math.log(2))
        grad = 2 * np.real((dh * u.conj()) @ (self.A @ J))
        return float(f), grad


@dataclass(frozen=True)
class EntropyConfig:
    starts: int = 64
    max_iters: int = 500
    ftol: float = 1e-13
    gtol: float = 1e-10
    seed: int = 0
    method: str = "L-BFGS-B"
    threads: int = 1


@dataclass(frozen=True)
class MinEntropyResult:
    subset: tuple[int, ...]
    min_entropy: float
    starts_used: int
    converged_starts: int
    best_params: StateParams | None = None


def start_points(d: int, cfg: EntropyConfig) -> np.ndarray:
    """Start i depends only on (seed, i), so a longer run extends a shorter one."""
    pts = np.empty((cfg.starts, 2 * d - 1))
    for i in range(cfg.starts):
        rng = np.random.default_rng([cfg.seed, i])
        pts[i, :d - 1] = rng.uniform(-np.pi, np.pi, d - 1)
        pts[i, d - 1:] = rng.uniform(0, 2 * np.pi, d)
    return pts


def min_entropy(subset, family: MubFamily, cfg: EntropyConfig = EntropyConfig()) -> MinEntropyResult:
    if cfg.starts < 1:
        raise ValueError("need at least one start")
    subset = canonical(subset)
    obj = _Objective(subset, family)
    best, best_theta, converged = math.inf, None, 0
    for x0 in start_points(family.d, cfg):
        res = minimize(obj.value_and_grad, x0, jac=True, method=cfg.method,
                       options={"maxiter": cfg.max_iters, "ftol": cfg.ftol, "gtol": cfg.gtol})
        converged += bool(res.success)
        # re-evaluate without the probability floor
        val = entropy_sum(state_from_params(res.x, family.d), subset, family)
        if val < best:
            best, best_theta = val, res.x
    return MinEntropyResult(subset, max(best, 0.0), cfg.starts, converged,
                            StateParams.from_vector(best_theta, family.d))


@dataclass(frozen=True)
class EntropyReport:
    d: int
    k: int
    records: tuple[MinEntropyResult, ...]
    clusters: tuple[tuple[tuple[int, ...], ...], ...]
    gap: float
    config: EntropyConfig
    meta: dict = field(default_factory=dict)

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    def value(self, subset) -> float:
        subset = canonical(subset)
        for r in self.records:
            if r.subset == subset:
                return r.min_entropy
        raise KeyError(subset)

    def cluster_values(self) -> list[float]:
        return [float(np.mean([self.value(s) for s in c])) for c in self.clusters]

    def to_dict(self) -> dict:
        cfg = asdict(self.config)
        cfg.pop("threads")
        return {
            "d": self.d,
            "k": self.k,
            "gap": self.gap,
            "clusters": self.n_clusters,
            "cluster_values": [f"{v:.6f}" for v in self.cluster_values()],
            "cluster_members": [[list(s) for s in c] for c in self.clusters],
            "records": [{"subset": list(r.subset), "min_entropy": f"{r.min_entropy:.6f}",
                         "starts_used": r.starts_used, "converged_starts": r.converged_starts}
                        for r in self.records],
            "config": cfg,
            "meta": self.meta,
        }


def cluster_values(values: dict, gap: float) -> list[list]:
    """Single-linkage clusters of keys whose values chain with steps below ``gap``."""
    items = sorted(values.items(), key=lambda kv: (kv[1], kv[0]))
    clusters: list[list] = []
    prev = None
    for key, v in items:
        if prev is None or v - prev >= gap:
            clusters.append([])
        clusters[-1].append(key)
        prev = v
    return [sorted(c) for c in clusters]


def entropy_partition(d: int, k: int, family: MubFamily, gap: float = 0.05,
                      cfg: EntropyConfig = EntropyConfig(), subsets=None,
                      cap: int = ENTROPY_CAP) -> EntropyReport:
    if family.d != d:
        raise ValueError(f"family dimension {family.d} != d={d}")
    if subsets is None:
        total = math.comb(d + 1, k)
        if total > cap:
            from .orbits import ResourceGuardError
            raise ResourceGuardError(
                f"C({d + 1},{k}) = {total} subsets exceeds the entropy cap {cap};"
                " pass representative subsets instead")
        subsets = list(combinations(range(d + 1), k))
        mode = "full"
    else:
        subsets = sorted({canonical(s) for s in subsets})
        if any(len(s) != k for s in subsets):
            raise ValueError(f"all supplied subsets must have size k={k}")
        mode = "sampled"

    def run(s):
        return min_entropy(s, family, cfg)

    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as ex:
            records = tuple(ex.map(run, subsets))
    else:
        records = tuple(map(run, subsets))
    clusters = cluster_values({r.subset: r.min_entropy for r in records}, gap)
    meta = {"mode": mode, "log_base": LOG_BASE, "optimizer": f"multi-start {cfg.method}",
            "lower_bound_on_classes": len(clusters)}
    return EntropyReport(d, k, records, tuple(tuple(c) for c in clusters), gap, cfg, meta)
