"""
Finite-dimensional Hilbert-space arithmetic.

States, operators, effects and density operators are immutable dense numpy
arrays wrapped in frozen dataclasses. Every value is validated on
construction, so an instance that exists satisfies its invariants.
"""

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, fields, replace
from typing import Self

import numpy as np

from quantum.errors import (
    BasisMismatchError,
    CoefficientsNotNormalizedError,
    DimensionMismatchError,
    ExpectationOutOfRangeError,
    InvalidEffectError,
    InvalidOperatorError,
    InvalidStateError,
    NotOrthogonalError,
    NotPositiveError,
)

logger = logging.getLogger(__name__)

ComplexAmplitude = complex
MAX_DIM = 32


@dataclass(frozen=True)
class Tolerances:
    """Named numerical tolerances. Exact zeros of the theory become these."""

    norm: float = 1e-12
    herm: float = 1e-10
    pos: float = 1e-10
    kernel: float = 1e-10
    orth: float = 1e-10
    coeff: float = 1e-10
    trace: float = 1e-12
    complete: float = 1e-10
    imag: float = 1e-10

    def with_overrides(self, overrides: Mapping[str, float]) -> Self:
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"Unknown tolerance(s): {sorted(unknown)}; known: {sorted(known)}")
        for name, value in overrides.items():
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"Tolerance '{name}' must be positive and finite, got {value}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})

    def to_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_TOLERANCES = Tolerances()


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=np.complex128, copy=True)
    out.flags.writeable = False
    return out


def check_amplitude(c: complex) -> ComplexAmplitude:
    c = complex(c)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise InvalidStateError(f"Amplitude {c} is not finite")
    return c


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normed amplitude vector over an ordered basis of opaque labels."""

    amplitudes: np.ndarray
    basis_labels: tuple[str, ...]
    tol: Tolerances = DEFAULT_TOLERANCES

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        labels = tuple(str(label) for label in self.basis_labels)
        if amps.ndim != 1 or amps.size < 1:
            raise InvalidStateError(f"Amplitudes must be a non-empty vector, got shape {amps.shape}")
        if amps.size != len(labels):
            raise InvalidStateError(
                f"{amps.size} amplitudes for {len(labels)} basis labels {list(labels)}"
            )
        if len(set(labels)) != len(labels):
            raise InvalidStateError(f"Basis labels must be distinct: {list(labels)}")
        if not np.all(np.isfinite(amps)):
            raise InvalidStateError("Amplitudes contain NaN or Inf")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > self.tol.norm:
            raise InvalidStateError(f"State norm {norm!r} differs from 1 by more than {self.tol.norm}")
        object.__setattr__(self, "amplitudes", _frozen(amps))
        object.__setattr__(self, "basis_labels", labels)

    @classmethod
    def from_amplitudes(
        cls,
        amplitudes: Sequence[complex] | np.ndarray,
        basis_labels: Sequence[str],
        normalize: bool = False,
        tol: Tolerances = DEFAULT_TOLERANCES,
    ) -> Self:
        amps = np.asarray(amplitudes, dtype=np.complex128)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0 or not np.isfinite(norm):
                raise InvalidStateError("Cannot normalize a zero or non-finite vector")
            amps = amps / norm
        return cls(amps, tuple(basis_labels), tol)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    def amplitude(self, label: str) -> ComplexAmplitude:
        return complex(self.amplitudes[self.index(label)])

    def index(self, label: str) -> int:
        try:
            return self.basis_labels.index(label)
        except ValueError:
            raise BasisMismatchError(
                f"Label '{label}' not in basis {list(self.basis_labels)}"
            ) from None

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.basis_labels == other.basis_labels and bool(
            np.array_equal(self.amplitudes, other.amplitudes)
        )


def basis_state(basis_labels: Sequence[str], label: str) -> StateVector:
    labels = tuple(basis_labels)
    if label not in labels:
        raise BasisMismatchError(f"Label '{label}' not in basis {list(labels)}")
    amps = np.zeros(len(labels), dtype=np.complex128)
    amps[labels.index(label)] = 1.0
    return StateVector(amps, labels)


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense square complex matrix."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise InvalidOperatorError(f"Operator must be a non-empty square matrix, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidOperatorError("Operator entries contain NaN or Inf")
        object.__setattr__(self, "entries", _frozen(m))

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def norm(self) -> float:
        """Spectral norm."""
        return float(np.linalg.norm(self.entries, 2))

    @classmethod
    def identity(cls, dim: int) -> Self:
        return cls(np.eye(dim, dtype=np.complex128))

    @classmethod
    def zeros(cls, dim: int) -> Self:
        return cls(np.zeros((dim, dim), dtype=np.complex128))


@dataclass(frozen=True)
class EffectDiagnostics:
    hermiticity_residual: float
    eigenvalues: tuple[float, ...]
    hermitian: bool
    lower_bound_ok: bool
    upper_bound_ok: bool

    @property
    def min_eigenvalue(self) -> float:
        return self.eigenvalues[0]

    @property
    def max_eigenvalue(self) -> float:
        return self.eigenvalues[-1]

    @property
    def positive(self) -> bool:
        return self.hermitian and self.lower_bound_ok

    @property
    def passed(self) -> bool:
        return self.hermitian and self.lower_bound_ok and self.upper_bound_ok


def validate_effect(op: Operator, tol: Tolerances = DEFAULT_TOLERANCES) -> EffectDiagnostics:
    """
    Diagnose whether op is an effect: hermitian with spectrum in [0, 1].
    Never raises; the hermitian part is diagonalized even if op is not hermitian.
    """
    m = op.entries
    residual = float(np.max(np.abs(m - m.conj().T)))
    eigenvalues = np.linalg.eigvalsh((m + m.conj().T) / 2)
    return EffectDiagnostics(
        hermiticity_residual=residual,
        eigenvalues=tuple(float(v) for v in eigenvalues),
        hermitian=residual <= tol.herm,
        lower_bound_ok=float(eigenvalues[0]) >= -tol.pos,
        upper_bound_ok=float(eigenvalues[-1]) <= 1.0 + tol.pos,
    )


def require_positive(op: Operator, tol: Tolerances = DEFAULT_TOLERANCES) -> EffectDiagnostics:
    diagnostics = validate_effect(op, tol)
    if not diagnostics.hermitian:
        raise InvalidEffectError(
            f"Operator is not hermitian (residual {diagnostics.hermiticity_residual:.3e})"
        )
    if not diagnostics.lower_bound_ok:
        raise NotPositiveError(
            f"Operator is not positive: min eigenvalue {diagnostics.min_eigenvalue:.3e}"
        )
    return diagnostics


@dataclass(frozen=True, eq=False)
class Effect:
    """Hermitian operator with spectrum in [0, 1]; assigns event probabilities."""

    op: Operator
    tol: Tolerances = DEFAULT_TOLERANCES

    def __post_init__(self) -> None:
        op = self.op if isinstance(self.op, Operator) else Operator(np.asarray(self.op))
        object.__setattr__(self, "op", op)
        diagnostics = require_positive(op, self.tol)
        if not diagnostics.upper_bound_ok:
            raise InvalidEffectError(
                f"Effect spectrum exceeds 1: max eigenvalue {diagnostics.max_eigenvalue:.3e}"
            )

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> Self:
        return cls(Operator(matrix), tol)

    @property
    def matrix(self) -> np.ndarray:
        return self.op.entries

    @property
    def dim(self) -> int:
        return self.op.dim


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive, unit-trace operator for non-pure states."""

    op: Operator
    tol: Tolerances = DEFAULT_TOLERANCES

    def __post_init__(self) -> None:
        op = self.op if isinstance(self.op, Operator) else Operator(np.asarray(self.op))
        object.__setattr__(self, "op", op)
        diagnostics = validate_effect(op, self.tol)
        if not diagnostics.hermitian:
            raise InvalidStateError(
                f"Density operator not hermitian (residual {diagnostics.hermiticity_residual:.3e})"
            )
        if not diagnostics.lower_bound_ok:
            raise InvalidStateError(
                f"Density operator not positive: min eigenvalue {diagnostics.min_eigenvalue:.3e}"
            )
        trace = complex(np.trace(op.entries))
        if abs(trace - 1.0) > self.tol.trace:
            raise InvalidStateError(f"Density operator trace {trace} differs from 1")

    @classmethod
    def pure(cls, phi: StateVector) -> Self:
        return cls(Operator(phi.projector()), phi.tol)

    @classmethod
    def mixture(cls, weights: Sequence[float], states: Sequence[StateVector]) -> Self:
        if len(weights) != len(states) or not states:
            raise InvalidStateError("Mixture needs one weight per state and at least one state")
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or not math.isclose(float(w.sum()), 1.0, abs_tol=1e-12):
            raise InvalidStateError(f"Mixture weights must be a probability vector, got {weights}")
        _same_basis(states)
        rho = sum((wi * s.projector() for wi, s in zip(w, states, strict=True)), start=0j)
        return cls(Operator(rho))

    @property
    def dim(self) -> int:
        return self.op.dim


def _same_basis(states: Sequence[StateVector]) -> tuple[str, ...]:
    labels = states[0].basis_labels
    for s in states[1:]:
        if s.basis_labels != labels:
            raise BasisMismatchError(
                f"States use different bases: {list(labels)} vs {list(s.basis_labels)}"
            )
    return labels


def superpose(
    c1: complex,
    phi1: StateVector,
    c2: complex,
    phi2: StateVector,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> StateVector:
    """Return c1·phi1 + c2·phi2 for orthogonal normed phi1, phi2 and |c1|²+|c2|² = 1."""
    c1, c2 = check_amplitude(c1), check_amplitude(c2)
    labels = _same_basis([phi1, phi2])
    overlap = complex(np.vdot(phi1.amplitudes, phi2.amplitudes))
    if abs(overlap) > tol.orth:
        raise NotOrthogonalError(f"<phi1|phi2> = {overlap} exceeds {tol.orth}")
    weight = abs(c1) ** 2 + abs(c2) ** 2
    if abs(weight - 1.0) > tol.coeff:
        raise CoefficientsNotNormalizedError(f"|c1|^2 + |c2|^2 = {weight!r}")
    amps = c1 * phi1.amplitudes + c2 * phi2.amplitudes
    norm = float(np.linalg.norm(amps))
    # coefficients inside tol.coeff may still miss tol.norm
    if abs(norm - 1.0) > tol.norm:
        amps = amps / norm
    return StateVector(amps, labels, tol)


def _check_dims(dim: int, other: int, what: str) -> None:
    if dim != other:
        raise DimensionMismatchError(f"{what}: operator dimension {dim} vs {other}")


def _as_probability(value: complex, tol: Tolerances, what: str) -> float:
    if abs(value.imag) > tol.imag:
        raise ExpectationOutOfRangeError(
            f"{what} has imaginary residue {value.imag:.3e}; operator is not a valid effect"
        )
    p = value.real
    if p < -tol.pos or p > 1.0 + tol.pos:
        raise ExpectationOutOfRangeError(f"{what} = {p!r} outside [0, 1]; invalid effect")
    return min(max(p, 0.0), 1.0)


def expectation(A: Effect, phi: StateVector, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Event probability <phi|A|phi>."""
    _check_dims(A.dim, phi.dim, "expectation")
    value = complex(np.vdot(phi.amplitudes, A.matrix @ phi.amplitudes))
    return _as_probability(value, tol, "<phi|A|phi>")


def expectation_mixed(
    A: Effect, rho: DensityOperator, tol: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """Event probability trace(rho·A)."""
    _check_dims(A.dim, rho.dim, "expectation_mixed")
    value = complex(np.einsum("ij,ji->", rho.op.entries, A.matrix))
    return _as_probability(value, tol, "trace(rho A)")


@dataclass(frozen=True)
class KernelCheck:
    member: bool
    residual: float
    threshold: float
    lemma_bound: float

    def __bool__(self) -> bool:
        return self.member


def kernel_member(
    A: Effect | Operator, psi: StateVector, tol: Tolerances = DEFAULT_TOLERANCES
) -> KernelCheck:
    """
    Decide A·psi = 0 for positive A.

    For positive A, ||A psi||^2 <= ||A|| <psi|A|psi>, reported as lemma_bound,
    so a vanishing expectation forces kernel membership.
    """
    op = A.op if isinstance(A, Effect) else A
    require_positive(op, tol)
    _check_dims(op.dim, psi.dim, "kernel_member")
    image = op.entries @ psi.amplitudes
    residual = float(np.linalg.norm(image))
    a_norm = op.norm()
    quad = max(float(np.vdot(psi.amplitudes, image).real), 0.0)
    threshold = tol.kernel * a_norm
    logger.debug("kernel residual %.3e against threshold %.3e", residual, threshold)
    return KernelCheck(
        member=residual <= threshold,
        residual=residual,
        threshold=threshold,
        lemma_bound=math.sqrt(a_norm * quad),
    )
