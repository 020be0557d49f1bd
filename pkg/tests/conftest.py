import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from jointmovelet.synthetic import make_dataset  # noqa: E402

_criteria: dict[str, list[str]] = {}


@pytest.fixture(scope="session")
def synthetic_root(tmp_path_factory):
    """Two-participant synthetic dataset with a ``config.ini`` at its root."""
    return make_dataset(tmp_path_factory.mktemp("data"), participants=("1", "2"))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria.setdefault(marker.args[0], []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_criteria, key=lambda c: int(c.split()[0])):
        outcomes = _criteria[crit]
        if "failed" in outcomes:
            status = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            status = "SKIPPED"
        else:
            status = "PASS"
        terminalreporter.write_line(f"criterion {crit}: {status}")
