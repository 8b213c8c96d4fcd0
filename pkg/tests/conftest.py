import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from missid.catalog import load_fixture  # noqa: E402

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def fixture_graph():
    cache = {}

    def get(name, validated=True):
        key = (name, validated)
        if key not in cache:
            cache[key] = load_fixture(name, validated)
        return cache[key]

    return get


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
