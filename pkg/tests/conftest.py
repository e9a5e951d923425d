import numpy as np
import pytest
from hypothesis import settings

from bracketpool.tournament import build_tournament

settings.register_profile("repo", deadline=None, max_examples=40)
settings.load_profile("repo")


@pytest.fixture
def T4():
    return build_tournament(4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240315)


_criteria: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None and (rep.when == "call" or rep.failed):
        _criteria.setdefault(mark.args[0], []).append(
            f"{item.name}: {'pass' if rep.passed else 'FAIL'}")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        parts = _criteria[n]
        status = "PASS" if all(p.endswith("pass") for p in parts) else "FAIL"
        terminalreporter.write_line(f"criterion {n:>2}: {status}  ({'; '.join(parts)})")
