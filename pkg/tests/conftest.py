import pytest

from mubclass.entropy_lb import EntropyConfig, entropy_partition
from mubclass.mub_core import build_prime_mubs
from mubclass.transform_table import build_table_analytic

_ACCEPTANCE: list[tuple[str, str, float]] = []


@pytest.fixture(scope="session")
def fam5():
    return build_prime_mubs(5)


@pytest.fixture(scope="session")
def table5():
    return build_table_analytic(5)


@pytest.fixture(scope="session")
def entropy_d5(fam5):
    return entropy_partition(5, 3, fam5, gap=0.05, cfg=EntropyConfig(seed=1))


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv("MUBCLASS_CACHE", str(d))
    return d


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.module.__name__.endswith("test_acceptance"):
        label = (item.function.__doc__ or item.name).strip().splitlines()[0]
        if hasattr(item, "callspec"):
            label += f" [{item.callspec.id}]"
        _ACCEPTANCE.append((label, rep.outcome, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome, dur in _ACCEPTANCE:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{mark}] {label} ({dur:.1f}s)")
