import os

import pytest

ACCEPTANCE_LINES = []


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running exact-solver checks (deselect with -m 'not slow')")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("BTTP_SKIP_SLOW"):
        skip = pytest.mark.skip(reason="BTTP_SKIP_SLOW is set")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
