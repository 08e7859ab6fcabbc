"""Arrangements of optical elements and propagation of a single quantum through them."""

import logging
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from optics.elements import OpticalElement, PhaseShifter
from quantum.errors import (
    AmbiguousSweptPhaseError,
    BasisMismatchError,
    InvalidElementError,
    InvalidParamsError,
    NoSweptPhaseError,
    ZeroSurvivalError,
)
from quantum.hilbert import (
    DEFAULT_TOLERANCES,
    Effect,
    StateVector,
    Tolerances,
    basis_state,
    expectation,
)

logger = logging.getLogger(__name__)

Layout = Literal["a", "b", "c", "custom"]
LAYOUTS: tuple[str, ...] = ("a", "b", "c", "custom")


@dataclass(frozen=True)
class Arrangement:
    """
    Ordered optical elements over a path basis.

    `layout` tags the detector placement (a, b or c); it carries no behavior
    here (detector semantics live in detection.povm).
    """

    basis_labels: tuple[str, ...]
    elements: tuple[OpticalElement, ...] = ()
    layout: Layout = "custom"

    def __post_init__(self) -> None:
        labels = tuple(self.basis_labels)
        if not labels:
            raise InvalidElementError("Arrangement basis must be nonempty")
        if self.layout not in LAYOUTS:
            raise InvalidElementError(f"Unknown layout '{self.layout}', expected one of {LAYOUTS}")
        elements = tuple(self.elements)
        for element in elements:
            element.matrix(labels)  # raises on labels outside the basis
        object.__setattr__(self, "basis_labels", labels)
        object.__setattr__(self, "elements", elements)

    def source_state(self) -> StateVector:
        return basis_state(self.basis_labels, self.basis_labels[0])

    def swept_index(self) -> int:
        swept = [
            i for i, e in enumerate(self.elements) if isinstance(e, PhaseShifter) and e.swept
        ]
        if not swept:
            raise NoSweptPhaseError("Arrangement has no PhaseShifter marked as swept")
        if len(swept) > 1:
            raise AmbiguousSweptPhaseError(f"Elements {swept} are all marked as swept")
        return swept[0]

    def with_phase(self, phase: float) -> "Arrangement":
        k = self.swept_index()
        shifter = self.elements[k]
        assert isinstance(shifter, PhaseShifter)
        elements = (*self.elements[:k], shifter.with_phase(phase), *self.elements[k + 1 :])
        return Arrangement(self.basis_labels, elements, self.layout)


@dataclass(frozen=True)
class PropagationResult:
    conditional_state: StateVector
    survival_probability: float


def propagate(
    state: StateVector, element: OpticalElement, tol: Tolerances = DEFAULT_TOLERANCES
) -> PropagationResult:
    m = element.matrix(state.basis_labels)
    out = m @ state.amplitudes
    if element.unitary:
        return PropagationResult(StateVector(out, state.basis_labels, tol), 1.0)
    survival = float(np.vdot(out, out).real)
    if survival == 0.0:
        raise ZeroSurvivalError(
            f"{element.kind} on '{getattr(element, 'path', '?')}' absorbed the whole state"
        )
    conditional = StateVector.from_amplitudes(out, state.basis_labels, normalize=True, tol=tol)
    return PropagationResult(conditional, min(survival, 1.0))


def run_arrangement(
    arr: Arrangement, state: StateVector, tol: Tolerances = DEFAULT_TOLERANCES
) -> PropagationResult:
    if state.basis_labels != arr.basis_labels:
        raise BasisMismatchError(
            f"Input basis {list(state.basis_labels)} does not match arrangement "
            f"basis {list(arr.basis_labels)}"
        )
    result = PropagationResult(state, 1.0)
    for element in arr.elements:
        step = propagate(result.conditional_state, element, tol)
        result = PropagationResult(
            step.conditional_state, result.survival_probability * step.survival_probability
        )
    return result


def detection_probability(
    arr: Arrangement,
    state: StateVector,
    effect: Effect,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Unconditional probability: survival × <out|E|out>; 0 if nothing survives."""
    try:
        result = run_arrangement(arr, state, tol)
    except ZeroSurvivalError:
        return 0.0
    return result.survival_probability * expectation(effect, result.conditional_state, tol)


def fringe_scan(
    arr: Arrangement,
    phases: Iterable[float],
    output_effect: Effect,
    input_state: StateVector | None = None,
    workers: int = 1,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[tuple[float, float]]:
    """(φ, probability) for each φ of the swept PhaseShifter, in input order."""
    arr.swept_index()
    state = input_state if input_state is not None else arr.source_state()
    phases = [float(p) for p in phases]

    def point(phase: float) -> tuple[float, float]:
        return phase, detection_probability(arr.with_phase(phase), state, output_effect, tol)

    if workers <= 1:
        return [point(p) for p in phases]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(point, phases))


def visibility(probabilities: Sequence[float]) -> float:
    """(max − min) / (max + min); 0 for an all-zero scan."""
    hi, lo = max(probabilities), min(probabilities)
    return 0.0 if hi + lo == 0 else (hi - lo) / (hi + lo)


def phase_grid(steps: int) -> list[float]:
    """`steps` uniform points over [0, 2π)."""
    if steps < 1:
        raise InvalidParamsError(f"phase grid needs at least one point, got {steps}")
    return [2 * np.pi * k / steps for k in range(steps)]
