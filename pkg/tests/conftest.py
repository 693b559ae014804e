"""Shared fixtures: the velocity grid used by the correction checks and a
small reference knapsack instance."""

import numpy as np
import pytest

from vcbpso.knapsack import KnapsackInstance
from vcbpso.transfer import TransferKind

ALL_KINDS = list(TransferKind)

# one line per acceptance criterion, echoed after the test summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def velocity_grid() -> np.ndarray:
    """Log-spaced magnitudes 10^-6 .. 10^6 plus 0.5, 1, 2, 5, both signs."""
    mags = {10.0 ** k for k in range(-6, 7)} | {0.5, 1.0, 2.0, 5.0}
    return np.array(sorted(mags | {-m for m in mags}))


@pytest.fixture(scope="session")
def grid() -> np.ndarray:
    return velocity_grid()


@pytest.fixture
def three_items() -> KnapsackInstance:
    """Items (w,p) = (2,3), (3,4), (4,5) with capacity 5; optimum is 7."""
    return KnapsackInstance(np.array([2, 3, 4]), np.array([3, 4, 5]), 5)
