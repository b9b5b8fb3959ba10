import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

from fgadyn import fixtures  # noqa: E402


@pytest.fixture
def trib():
    return fixtures.tribonacci()


@pytest.fixture
def trib4():
    return fixtures.tribonacci_x_id()


@pytest.fixture
def fix_a():
    return fixtures.fix_a()


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    lines = getattr(test_acceptance, "RESULTS", None)
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
