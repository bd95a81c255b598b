from functools import lru_cache

import numpy as np
import pytest

from actime.generators import SeriesKind, SeriesSpec, generate


@lru_cache(maxsize=64)
def bench(kind: str, n: int, seed: int):
    """Cached benchmark series; tests must not mutate the result."""
    return generate(SeriesSpec(SeriesKind(kind), n, seed))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def ar1_long():
    return bench("ar1", 500_000, 7)


@pytest.fixture(scope="session")
def ar2_long():
    return bench("ar2", 500_000, 7)


@pytest.fixture(scope="session")
def iid_long():
    from actime.generators import gen_ar1

    return gen_ar1(100_000, phi=0.0, seed=3)


@pytest.fixture(scope="session")
def stat_sweep():
    """Every series and default method over ten seeds at lengths 10^3 and 5*10^5."""
    from actime.harness import SweepConfig, run_sweep

    return run_sweep(SweepConfig(lengths=[1000, 500_000], seeds=list(range(10))))


def median_tau(result, series, method, length):
    taus = [r.tau for r in result.rows
            if (r.series, r.method, r.length) == (series, method, length) and r.tau is not None]
    return float(np.median(taus)) if taus else None


# -- acceptance summary: one line per criterion -------------------------------

_criteria: dict[int, list[tuple[str, str]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria.setdefault(marker.args[0], []).append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        parts = _criteria[n]
        ok = all(outcome == "passed" for _, outcome in parts)
        names = ", ".join(f"{name} {outcome}" for name, outcome in parts)
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  ({names})")
