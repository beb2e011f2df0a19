import numpy as np
import pytest

from hawkesrank.core import HawkesModel


@pytest.fixture
def two_type_model():
    return HawkesModel.from_arrays([0.2, 0.3], [[0.3, 0.15], [0.2, 0.35]], 1.0)


def random_stable(rng, M, radius=None):
    """Random positive M x M matrix scaled to the given spectral radius."""
    A = rng.uniform(0.0, 1.0, size=(M, M))
    r = radius if radius is not None else rng.uniform(0.1, 0.9)
    return A * (r / np.max(np.abs(np.linalg.eigvals(A))))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
