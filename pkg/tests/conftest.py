"""Shared fixtures: one solution-curve point and surfaces built there."""

import pytest

from tpms import periods
from tpms.surface import build_surface


@pytest.fixture(scope="session")
def curve_point():
    """The solution-curve point with a = 0.47 (the Figure 1 member)."""
    return periods.curve_point_at(0.47)


@pytest.fixture(scope="session")
def build16(curve_point):
    return build_surface(curve_point.params, 16)


@pytest.fixture(scope="session")
def build64(curve_point):
    return build_surface(curve_point.params, 64)


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance_line(request):
    """Record the one-line verdict of an acceptance criterion for the terminal summary."""

    def record(text):
        request.config.stash[_ACCEPTANCE].append(text)
        print(text)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for ln in sorted(lines):
            terminalreporter.write_line(ln)
