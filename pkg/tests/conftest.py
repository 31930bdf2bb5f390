import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from irclab import set_cap_overrides  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(autouse=True)
def _clean_caps():
    set_cap_overrides({})
    yield
    set_cap_overrides({})


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
