"""
Numerical certificate for the reduction theorem.

If a positive A has <psi1|A|psi1> = eps1 and <psi2|A|psi2> = eps2, then for
every superposition psi = c1 psi1 + c2 psi2

    <psi|A|psi> = ||A^(1/2) psi||^2 <= (|c1| sqrt(eps1) + |c2| sqrt(eps2))^2,

which is zero when both eps vanish. The verifier scans random coefficient
pairs plus fixed extreme points and compares against that bound.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from detection.sampling import THEOREM_STREAM, philox
from quantum.errors import DimensionMismatchError
from quantum.hilbert import (
    DEFAULT_TOLERANCES,
    Effect,
    Operator,
    StateVector,
    Tolerances,
    require_positive,
)
from quantum.random_ops import random_coefficients

logger = logging.getLogger(__name__)

_R = 1 / math.sqrt(2)
EXTREME_COEFFICIENTS = np.array(
    [
        [1, 0],
        [0, 1],
        [_R, _R],
        [_R, -_R],
        [_R, 1j * _R],
        [_R, -1j * _R],
    ],
    dtype=np.complex128,
)


@dataclass(frozen=True)
class TheoremReport:
    epsilon1: float
    epsilon2: float
    max_superposition_expectation: float
    bound: float
    samples: int
    passed: bool
    worst_excess: float
    operator_norm: float
    worst_coefficients: tuple[complex, complex]

    @property
    def normalized_max(self) -> float:
        """max expectation / ||A||; 0 for the zero operator."""
        if self.operator_norm == 0:
            return 0.0
        return self.max_superposition_expectation / self.operator_norm


def scan_superpositions(
    op: Operator, psi1: StateVector, psi2: StateVector, coefficients: np.ndarray
) -> np.ndarray:
    """
    Real part of <psi|op|psi> for psi = c1 psi1 + c2 psi2, one value per row of
    `coefficients`. Performs no validation of op.
    """
    if not (op.dim == psi1.dim == psi2.dim):
        raise DimensionMismatchError(
            f"Operator dimension {op.dim} vs states {psi1.dim}, {psi2.dim}"
        )
    basis = np.stack([psi1.amplitudes, psi2.amplitudes])
    psis = coefficients @ basis
    return np.einsum("nd,de,ne->n", psis.conj(), op.entries, psis).real


def verify_reduction_theorem(
    A: Effect | Operator,
    psi1: StateVector,
    psi2: StateVector,
    n_samples: int = 1000,
    seed: int | np.random.Generator = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> TheoremReport:
    """
    Raises NotPositiveError when A is not positive: the hypothesis fails and
    the bound does not apply.
    """
    op = A.op if isinstance(A, Effect) else A
    require_positive(op, tol)
    rng = seed if isinstance(seed, np.random.Generator) else philox(seed, THEOREM_STREAM)
    coefficients = np.concatenate([EXTREME_COEFFICIENTS, random_coefficients(rng, n_samples)])

    values = scan_superpositions(op, psi1, psi2, coefficients)
    edges = scan_superpositions(op, psi1, psi2, EXTREME_COEFFICIENTS[:2])
    eps1, eps2 = float(edges[0]), float(edges[1])
    bounds = (
        np.abs(coefficients[:, 0]) * math.sqrt(max(eps1, 0.0))
        + np.abs(coefficients[:, 1]) * math.sqrt(max(eps2, 0.0))
    ) ** 2

    worst = int(np.argmax(values))
    max_value = float(values[worst])
    bound = float(np.max(bounds))
    report = TheoremReport(
        epsilon1=eps1,
        epsilon2=eps2,
        max_superposition_expectation=max_value,
        bound=bound,
        samples=len(coefficients),
        passed=max_value <= bound + tol.kernel,
        worst_excess=float(np.max(values - bounds)),
        operator_norm=op.norm(),
        worst_coefficients=(complex(coefficients[worst, 0]), complex(coefficients[worst, 1])),
    )
    logger.debug("theorem check: %s", report)
    return report


def indefinite_counterexample() -> tuple[Operator, StateVector, StateVector]:
    """
    diag(1, -1) with psi1 = (1, 1)/√2, psi2 = (1, -1)/√2: both expectations
    vanish, yet the superpositions reach ±1.
    """
    labels = ("I", "II")
    op = Operator(np.diag([1.0, -1.0]))
    psi1 = StateVector.from_amplitudes([_R, _R], labels)
    psi2 = StateVector.from_amplitudes([_R, -_R], labels)
    return op, psi1, psi2
