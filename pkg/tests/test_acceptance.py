"""One test per acceptance criterion; the conftest hooks print a PASS/FAIL summary."""
import json
import time
from math import comb

import numpy as np
import pytest

from mubclass.bounds import theorem1_bound
from mubclass.cli import main
from mubclass.entropy_lb import EntropyConfig, entropy_partition
from mubclass.mub_core import build_prime_mubs, build_prime_power_mubs
from mubclass.orbits import classify_all, permutation_group
from mubclass.prime_power import discover_permutations, extended_table, is_group
from mubclass.transform_table import build_table_analytic, build_table_numeric

TABLE_D5 = [
    [5, 1, 3, 2, 4, 0],
    [5, 2, 4, 3, 0, 1],
    [5, 3, 0, 4, 1, 2],
    [5, 4, 1, 0, 2, 3],
    [5, 0, 2, 1, 3, 4],
    [0, 1, 2, 3, 4, 5],
    [0, 4, 3, 2, 1, 5],
]

# reference class counts, k = 3 .. d+1
COLUMNS = {
    5: [2, 1, 1, 1],
    7: [1, 2, 1, 1, 1, 1],
    11: [1, 2, 2, 4, 2, 2, 1, 1, 1, 1],
    13: [2, 4, 5, 7, 10, 7, 5, 4, 2, 1, 1, 1],
    17: [2, 4, 8, 15, 20, 27, 34, 27, 20, 15, 8, 4, 2, 1, 1, 1],
    19: [1, 4, 5, 13, 18, 31, 33, 44, 33, 31, 18, 13, 5, 4, 1, 1, 1, 1],
}
SPOT = {(23, 12): 268, (29, 8): 531, (31, 8): 415, (37, 9): 6624}
D9_COLUMN = [2, 3, 3, 3, 2, 1, 1, 1]

# counts computed during this module, keyed by (d, k)
COMPUTED: dict[tuple[int, int], int] = {}
TIMES: dict[int, float] = {}


def count(d, k, table=None):
    if (d, k) not in COMPUTED:
        COMPUTED[(d, k)] = classify_all(d, k, build_table_analytic(d) if table is None else table).n_classes
    return COMPUTED[(d, k)]


@pytest.fixture(scope="module")
def d8():
    t0 = time.perf_counter()
    fam = build_prime_power_mubs(2, 3)
    res = discover_permutations(fam)
    table = extended_table(fam, res)
    counts = {k: classify_all(8, k, table).n_classes for k in range(1, 10)}
    return res, counts, time.perf_counter() - t0


@pytest.fixture(scope="module")
def d9():
    t0 = time.perf_counter()
    fam = build_prime_power_mubs(3, 2)
    res = discover_permutations(fam)
    table = extended_table(fam, res)
    counts = {k: classify_all(9, k, table).n_classes for k in range(1, 11)}
    return res, counts, time.perf_counter() - t0


@pytest.fixture(scope="module")
def entropy5():
    fam = build_prime_mubs(5)
    cfg = EntropyConfig(seed=7)
    a = entropy_partition(5, 3, fam, gap=0.05, cfg=cfg)
    b = entropy_partition(5, 3, fam, gap=0.05, cfg=cfg)
    return a, b


def test_table_d5():
    """Reference d=5 table: analytic and numeric d=5 tables match all 42 entries, < 1 s"""
    t0 = time.perf_counter()
    analytic = build_table_analytic(5).array().tolist()
    numeric = build_table_numeric(build_prime_mubs(5)).array().tolist()
    elapsed = time.perf_counter() - t0
    assert analytic == TABLE_D5 and numeric == TABLE_D5
    assert elapsed < 1.0


def test_analytic_numeric_equivalence():
    """Analytic and numeric tables agree entrywise for d in {3,5,7,11,13}, < 30 s"""
    t0 = time.perf_counter()
    for d in (3, 5, 7, 11, 13):
        a = build_table_analytic(d).array()
        n = build_table_numeric(build_prime_mubs(d)).array()
        assert np.array_equal(a, n), d
    assert time.perf_counter() - t0 < 30


@pytest.mark.parametrize("d", sorted(COLUMNS), ids=lambda d: f"d{d}")
def test_class_counts(d):
    """Class counts for every listed k at d in {5,7,11,13,17,19}, exact; d=19 < 2 min"""
    table = build_table_analytic(d)
    t0 = time.perf_counter()
    got = [count(d, k, table) for k in range(1, d + 2)]
    TIMES[d] = time.perf_counter() - t0
    assert got[2:] == COLUMNS[d]
    assert TIMES[d] < (120 if d == 19 else 60)


@pytest.mark.parametrize("dk", sorted(SPOT), ids=lambda dk: f"d{dk[0]}k{dk[1]}")
def test_large_d(dk):
    """Large-d spot checks (23,12)=268 (29,8)=531 (31,8)=415 (37,9)=6624; d=31 < 3 min"""
    d, k = dk
    t0 = time.perf_counter()
    assert count(d, k) == SPOT[dk]
    if d == 31:
        assert time.perf_counter() - t0 < 180


def test_theorem1():
    """Class-count upper bound: saturated at (5,3), valid at every computed (d,k), N_1 = N_d = 1"""
    assert theorem1_bound(5, 3) == 2 == count(5, 3)
    for d in COLUMNS:
        assert count(d, 1) == count(d, d) == 1
    for (d, k), n in sorted(COMPUTED.items()):
        if 1 < k < d:
            assert n <= comb(d + 1, k) // (2 * d), (d, k)


def test_duality(d8, d9, capsys):
    """Complement duality N_k = N_(d+1-k) for all computed (d,k) incl. prime powers; d=23 k=4/k=20 reported"""
    table23 = build_table_analytic(23)
    for k in range(1, 25):
        count(23, k, table23)
    for d, k in list(SPOT):
        count(d, d + 1 - k)
    for (d, k), n in sorted(COMPUTED.items()):
        if k <= d:
            assert n == COMPUTED[(d, d + 1 - k)], (d, k)
    for counts, d in ((d8[1], 8), (d9[1], 9)):
        for k in range(1, d + 1):
            assert counts[k] == counts[d + 1 - k], (d, k)
    with capsys.disabled():
        print(f"\n    d=23: N_4 = {COMPUTED[(23, 4)]}, N_20 = {COMPUTED[(23, 20)]}")
    assert COMPUTED[(23, 4)] == COMPUTED[(23, 20)] == 4


def test_prime_power_d8(d8):
    """Prime power d=8: permutation group of order 168, one class for k=3..9, < 1 min"""
    res, counts, elapsed = d8
    assert res.order == 168
    assert all(counts[k] == 1 for k in range(3, 10))
    assert elapsed < 60


def test_prime_power_d9(d9):
    """Prime power d=9: column (2,3,3,3,2,1,1,1) for k=3..10, < 15 min"""
    res, counts, elapsed = d9
    assert [counts[k] for k in range(3, 11)] == D9_COLUMN
    assert elapsed < 900


def test_entropy_d5(entropy5):
    """Entropy d=5,k=3: two clusters near 4.43 and 4.64 (+-0.05), same as orbits, repeat spread < 0.005"""
    a, b = entropy5
    assert a.n_clusters == 2
    lo, hi = a.cluster_values()
    assert abs(lo - 4.43) <= 0.05 and abs(hi - 4.64) <= 0.05
    orbits = classify_all(5, 3, build_table_analytic(5), keep_members=True)
    clusters = sorted(sorted(tuple(s) for s in c) for c in a.clusters)
    assert clusters == sorted(sorted(c.members) for c in orbits.classes)
    for r, s in zip(a.records, b.records):
        assert r.subset == s.subset and abs(r.min_entropy - s.min_entropy) < 0.005


def test_entropy_d7():
    """Entropy d=7,k=3: a single cluster"""
    rep = entropy_partition(7, 3, build_prime_mubs(7), gap=0.05, cfg=EntropyConfig(seed=0))
    assert rep.n_clusters == 1


def test_rows_are_permutations(d8, d9):
    """Property: every table row is a permutation of the basis labels"""
    tables = [build_table_analytic(d) for d in (3, 5, 7, 11, 13, 17, 19, 23)]
    tables += [extended_table(build_prime_power_mubs(2, 3), d8[0]),
               extended_table(build_prime_power_mubs(3, 2), d9[0])]
    for t in tables:
        arr = t.array()
        assert (np.sort(arr, axis=1) == np.arange(t.d + 1)).all()


def test_partition_coverage():
    """Property: each orbit partition covers C(d+1,k) exactly with disjoint classes"""
    for d in (5, 7, 11, 13):
        t = build_table_analytic(d)
        for k in range(1, d + 2):
            part = classify_all(d, k, t, keep_members=True)
            members = [m for c in part.classes for m in c.members]
            assert len(members) == len(set(members)) == part.total == comb(d + 1, k)


def test_entropy_orbit_invariance(entropy5):
    """Property: min-entropy is constant on orbits within 0.01 bits (d=5, d=7)"""
    a, _ = entropy5
    fam7 = build_prime_mubs(7)
    part7 = classify_all(7, 4, build_table_analytic(7), keep_members=True)
    sample = [s for c in part7.classes for s in sorted(c.members)[:4]]
    rep7 = entropy_partition(7, 4, fam7, cfg=EntropyConfig(seed=2), subsets=sample)
    for part, rep in ((classify_all(5, 3, build_table_analytic(5), keep_members=True), a),
                      (part7, rep7)):
        for c in part.classes:
            known = {r.subset: r.min_entropy for r in rep.records}
            vals = [known[s] for s in c.members if s in known]
            assert vals and max(vals) - min(vals) < 0.01


def test_permutation_group_closed(d8, d9):
    """Property: discovered permutation sets and generated groups are closed under composition and inverse"""
    assert is_group(d8[0].perms) and is_group(d9[0].perms)
    for d in (5, 7, 11):
        G = permutation_group(build_table_analytic(d))
        keys = {g.tobytes() for g in G}
        for g in G[:8]:
            assert np.argsort(g).astype(G.dtype).tobytes() in keys
            assert all(g[h].tobytes() in keys for h in G)


def test_digest_thread_independent(capsys):
    """Property: classify digests are identical across thread counts"""
    digests = []
    for threads in ("1", "2", "4"):
        assert main(["classify", "--d", "23", "--k", "5", "--threads", threads]) == 0
        digests.append(json.loads(capsys.readouterr().out)["meta"]["digest"])
    assert len(set(digests)) == 1
