from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"

# criterion number -> (title, outcome)
_ACCEPTANCE: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    entry = _ACCEPTANCE.setdefault(n, [title, "PASS"])
    if rep.failed or (rep.when == "call" and rep.skipped):
        entry[1] = "FAIL" if rep.failed else "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, status = _ACCEPTANCE[n]
        terminalreporter.write_line(f"[{status}] criterion {n}: {title}")


@pytest.fixture(scope="session")
def seeds() -> dict[str, int]:
    from devcorr.io import parse_key_values

    return {k: int(v) for k, v in parse_key_values((FIXTURES / "seeds.txt").read_text()).items()}
