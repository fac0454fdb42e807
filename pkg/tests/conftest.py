"""Shared fixtures plus the acceptance-summary terminal hook."""

import numpy as np
import pytest

from psilab import Grid

_ACCEPTANCE_LINES = []


def record_acceptance(number: int, title: str, passed: bool, detail: str = ""):
    """Collect one acceptance verdict; printed in the terminal summary."""
    mark = "PASS" if passed else "FAIL"
    suffix = f"  [{detail}]" if detail else ""
    _ACCEPTANCE_LINES.append((number, f"ACCEPTANCE {number:02d} {title}: {mark}{suffix}"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def unit_grid():
    """Small periodic grid on [0, 2*pi) with natural constants."""
    return Grid(128, 2.0 * np.pi)


@pytest.fixture
def osc_grid():
    """Grid wide enough for oscillator states up to n = 5 at default guards."""
    return Grid(512, 14.0)
