import math

import numpy as np
import pytest

from detection.sampling import philox
from quantum.hilbert import StateVector, basis_state

ARMS = ("I", "II")
R = 1 / math.sqrt(2)


@pytest.fixture
def arms() -> tuple[str, str]:
    return ARMS


@pytest.fixture
def arm_states() -> tuple[StateVector, StateVector]:
    return basis_state(ARMS, "I"), basis_state(ARMS, "II")


@pytest.fixture
def rng() -> np.random.Generator:
    return philox(20240601)


def triple_loop_expectation(matrix: np.ndarray, amplitudes: np.ndarray) -> complex:
    """Oracle for <phi|A|phi>, written without matrix products."""
    total = 0j
    n = len(amplitudes)
    for i in range(n):
        for j in range(n):
            total += amplitudes[i].conjugate() * matrix[i, j] * amplitudes[j]
    return total
