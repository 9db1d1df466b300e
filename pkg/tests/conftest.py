import numpy as np
import pytest

from spatialqudit.core import depolarize_to_linear_entropy
from spatialqudit.entanglement import nonmax_state

EPS_QUTRIT = 1.79 * np.exp(-0.07j * np.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def noisy_qutrit():
    """Qutrit family member at eps = 1.79 e^{-0.07 i pi} mixed to S_L = 0.18."""
    return depolarize_to_linear_entropy(nonmax_state("qutrit", EPS_QUTRIT).density(), 0.18)


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
