import json

import numpy as np
import pytest

from mubclass.mub_core import build_prime_mubs, build_prime_power_mubs
from mubclass.orbits import classify_all
from mubclass.prime_power import (SearchCapExceeded, cached_permutations, classify_prime_power,
                                  discover_permutations, extended_table, is_group)
from mubclass.transform_table import build_table_analytic


@pytest.fixture(scope="module")
def d8():
    fam = build_prime_power_mubs(2, 3)
    return fam, discover_permutations(fam)


def test_d8_order(d8):
    fam, res = d8
    assert res.order == 168 == 3 * 8 * 7
    assert res.mode == "exhaustive" and res.candidates == 40320
    assert tuple(range(8)) in res.perms
    assert res.perms == sorted(res.perms)


def test_d8_group_and_rows(d8):
    fam, res = d8
    assert is_group(res.perms)
    for g in res.generators:
        assert sorted(g.induced_images) == list(range(9))
        P = g.matrix()
        assert np.allclose(P @ P.T, np.eye(8))


def test_d8_table_size(d8):
    fam, res = d8
    t = extended_table(fam, res)
    assert len(t) == 178 and t.excluded == ()


def test_d8_single_class(d8):
    fam, res = d8
    t = extended_table(fam, res)
    for k in range(3, 10):
        assert classify_all(8, k, t).n_classes == 1


def test_d4():
    res = discover_permutations(build_prime_power_mubs(2, 2))
    assert is_group(res.perms) and res.order == 24


def test_prime_case_unchanged():
    fam = build_prime_mubs(5)
    res = discover_permutations(fam)
    assert is_group(res.perms) and res.order == 20  # affine maps j -> a j + b
    ext = extended_table(fam, res)
    plain = build_table_analytic(5)
    for k in range(1, 7):
        a = classify_all(5, k, ext, keep_members=True)
        b = classify_all(5, k, plain, keep_members=True)
        assert a.classes == b.classes


def test_structured_on_prime_matches_exhaustive():
    fam = build_prime_mubs(7)
    a = discover_permutations(fam)
    b = discover_permutations(fam, structured=True)
    assert a.perms == b.perms


def test_cap():
    fam = build_prime_power_mubs(2, 4)
    with pytest.raises(SearchCapExceeded):
        discover_permutations(fam, structured=False)


def test_is_group_negative():
    assert not is_group([(0, 1, 2), (1, 2, 0)])  # missing the square
    assert not is_group([(1, 0, 2)])  # no identity


def test_cache_roundtrip(tmp_path):
    fam = build_prime_power_mubs(2, 2)
    a, hit1 = cached_permutations(fam, tmp_path)
    b, hit2 = cached_permutations(fam, tmp_path)
    assert (hit1, hit2) == (False, True)
    assert a == b
    files = list(tmp_path.glob("perms-*.json"))
    assert len(files) == 1
    data = json.loads(files[0].read_text())
    assert data["key"].startswith("p2-n2-") and data["order"] == 24


def test_classify_prime_power_d9_k4():
    assert classify_prime_power(3, 2, 4).n_classes == 3


def test_d16_structured_recorded():
    fam = build_prime_power_mubs(2, 4)
    res = discover_permutations(fam)
    assert res.mode == "structured" and is_group(res.perms)
    t = extended_table(fam, res)
    counts = [classify_all(16, k, t).n_classes for k in range(1, 18)]
    # duality holds; absolute values have no external target
    assert counts == counts[:-1][::-1] + [1]
