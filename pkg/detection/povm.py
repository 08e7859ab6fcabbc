"""
Detector models as complete effect families.

A detector watches a path. Joint outcomes record which detectors fired, one
flag per detector, and each outcome carries an Effect; the family sums to
the identity.

Layouts a and b place one detector on each of two orthogonal paths. The
coincidence effect must vanish on both single-path states, and a positive
operator with zero expectation on two states annihilates their whole span,
so it is built as the zero operator. Layout c places two detectors in series
on one path, the first transmitting; detector inefficiency is independent
Bernoulli thinning of each detection attempt.
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from quantum.errors import (
    BasisMismatchError,
    IncompleteFamilyError,
    InvalidParamsError,
    LayoutMismatchError,
    MissingOutcomeError,
)
from quantum.hilbert import (
    DEFAULT_TOLERANCES,
    DensityOperator,
    Effect,
    Operator,
    StateVector,
    Tolerances,
    expectation,
    expectation_mixed,
)

PORT_NAMES = {"11": "coincidence", "10": "D1", "01": "D2", "00": "none"}
SERIAL_NAMES = {"11": "both", "10": "first_only", "01": "second_only", "00": "none"}


@dataclass(frozen=True)
class DetectorSpec:
    path: str
    efficiency: float = 1.0
    transmitting: bool = False

    def __post_init__(self) -> None:
        eta = float(self.efficiency)
        if not 0.0 <= eta <= 1.0:
            raise InvalidParamsError(f"Detector efficiency must lie in [0, 1], got {eta}")
        object.__setattr__(self, "efficiency", eta)


@dataclass(frozen=True)
class JointOutcome:
    fired: tuple[bool, ...]

    @property
    def key(self) -> str:
        return "".join("1" if f else "0" for f in self.fired)

    @classmethod
    def from_key(cls, key: str) -> "JointOutcome":
        return cls(tuple(ch == "1" for ch in key))

    @property
    def all_fired(self) -> bool:
        return all(self.fired)


@dataclass(frozen=True, eq=False)
class OutcomePOVM:
    outcomes: Mapping[JointOutcome, Effect]
    dim: int
    layout: str
    basis_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "outcomes", MappingProxyType(dict(self.outcomes)))

    def __getitem__(self, outcome: JointOutcome | str) -> Effect:
        if isinstance(outcome, str):
            outcome = JointOutcome.from_key(outcome)
        try:
            return self.outcomes[outcome]
        except KeyError:
            raise MissingOutcomeError(f"Outcome {outcome.key} not in family") from None

    def name(self, outcome: JointOutcome) -> str:
        names = SERIAL_NAMES if self.layout == "c" else PORT_NAMES
        return names.get(outcome.key, outcome.key)

    def completeness_residual(self) -> float:
        total = sum((e.matrix for e in self.outcomes.values()), start=np.zeros((self.dim,) * 2))
        return float(np.max(np.abs(total - np.eye(self.dim))))


def path_projector(labels: Sequence[str], path: str) -> np.ndarray:
    """Projector onto every basis label equal to `path` or of the form `path|...`."""
    diag = np.array([lab == path or lab.startswith(path + "|") for lab in labels], dtype=float)
    if not diag.any():
        raise BasisMismatchError(f"No basis label belongs to path '{path}' in {list(labels)}")
    return np.diag(diag).astype(np.complex128)


def build_joint_povm(
    layout: str,
    detectors: Sequence[DetectorSpec],
    basis_labels: Sequence[str],
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> OutcomePOVM:
    labels = tuple(basis_labels)
    dim = len(labels)
    if len(detectors) != 2:
        raise LayoutMismatchError(f"Layout {layout} needs two detectors, got {len(detectors)}")
    d1, d2 = detectors
    eta1, eta2 = d1.efficiency, d2.efficiency
    identity = np.eye(dim, dtype=np.complex128)

    if layout in ("a", "b"):
        if d1.path == d2.path:
            raise LayoutMismatchError(f"Layout {layout} needs detectors on two different paths")
        p1, p2 = path_projector(labels, d1.path), path_projector(labels, d2.path)
        if np.any(np.abs(p1 @ p2) > 0):
            raise LayoutMismatchError(f"Paths '{d1.path}' and '{d2.path}' overlap")
        matrices = {
            "11": np.zeros((dim, dim), dtype=np.complex128),
            "10": eta1 * p1,
            "01": eta2 * p2,
            "00": identity - eta1 * p1 - eta2 * p2,
        }
    elif layout == "c":
        if d1.path != d2.path:
            raise LayoutMismatchError("Layout c needs both detectors on the same path")
        if not d1.transmitting:
            raise LayoutMismatchError("Layout c needs the first detector to transmit")
        p = path_projector(labels, d1.path)
        matrices = {
            "11": eta1 * eta2 * p,
            "10": eta1 * (1 - eta2) * p,
            "01": (1 - eta1) * eta2 * p,
            "00": identity - (1 - (1 - eta1) * (1 - eta2)) * p,
        }
    else:
        raise LayoutMismatchError(f"No detector family for layout '{layout}'")

    povm = OutcomePOVM(
        {JointOutcome.from_key(k): Effect(Operator(m), tol) for k, m in matrices.items()},
        dim,
        layout,
        labels,
    )
    residual = povm.completeness_residual()
    if residual > tol.complete:
        raise IncompleteFamilyError(f"Effects sum to identity only within {residual:.3e}")
    return povm


def _probability(effect: Effect, state: StateVector | DensityOperator, tol: Tolerances) -> float:
    if isinstance(state, DensityOperator):
        return expectation_mixed(effect, state, tol)
    return expectation(effect, state, tol)


def outcome_probabilities(
    povm: OutcomePOVM,
    state: StateVector | DensityOperator,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> dict[JointOutcome, float]:
    return {o: _probability(e, state, tol) for o, e in povm.outcomes.items()}


def coincidence_probability(
    povm: OutcomePOVM,
    state: StateVector | DensityOperator,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Probability that every detector fires."""
    for outcome, effect in povm.outcomes.items():
        if outcome.all_fired:
            return _probability(effect, state, tol)
    raise MissingOutcomeError("Family has no all-fired outcome")


def serial_correlation(
    povm: OutcomePOVM, state: StateVector, tol: Tolerances = DEFAULT_TOLERANCES
) -> dict[str, float]:
    """Exact {both, first_only, second_only, none} distribution for a layout-c family."""
    if povm.layout != "c":
        raise LayoutMismatchError(f"Serial correlation needs layout c, got '{povm.layout}'")
    probabilities = outcome_probabilities(povm, state, tol)
    return {SERIAL_NAMES[o.key]: p for o, p in probabilities.items()}


def anticoincidence_effect(povm: OutcomePOVM, tol: Tolerances = DEFAULT_TOLERANCES) -> Effect:
    """The exactly-one event E[first_only] + E[second_only] of a layout-c family."""
    if povm.layout != "c":
        raise LayoutMismatchError(f"Anticoincidence needs layout c, got '{povm.layout}'")
    return Effect(Operator(povm["10"].matrix + povm["01"].matrix), tol)
