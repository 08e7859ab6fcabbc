"""
Optical elements acting on the path basis.

Beam splitter convention (symmetric, i on reflection):

    [[cos θ, i sin θ],
     [i sin θ, cos θ]]

θ = π/4 is the ideal 50:50 splitter. Mirrors are phase-free label swaps and
all path-length geometry lives in PhaseShifter elements.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass, replace
from typing import ClassVar

import numpy as np

from quantum.errors import BasisMismatchError, InvalidElementError, InvalidPathPairError
from quantum.hilbert import Operator


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidElementError(f"{name} must be finite, got {value}")
    return value


def _index(labels: Sequence[str], label: str) -> int:
    try:
        return list(labels).index(label)
    except ValueError:
        raise BasisMismatchError(f"Path '{label}' not in basis {list(labels)}") from None


def _pair_indices(labels: Sequence[str], pair: tuple[str, str]) -> tuple[int, int]:
    if len(pair) != 2 or pair[0] == pair[1]:
        raise InvalidPathPairError(f"Need two distinct path labels, got {pair}")
    missing = [p for p in pair if p not in labels]
    if missing:
        raise InvalidPathPairError(f"Path(s) {missing} not in basis {list(labels)}")
    return list(labels).index(pair[0]), list(labels).index(pair[1])


def beam_splitter_unitary(
    theta: float, labels: Sequence[str], pair: tuple[str, str] = ("I", "II")
) -> Operator:
    """Splitter matrix on `pair`, identity on every other basis label."""
    theta = _finite("mixing angle", theta)
    i, j = _pair_indices(labels, pair)
    u = np.eye(len(labels), dtype=np.complex128)
    c, s = math.cos(theta), 1j * math.sin(theta)
    u[i, i], u[i, j], u[j, i], u[j, j] = c, s, s, c
    return Operator(u)


@dataclass(frozen=True)
class BeamSplitter:
    theta: float = math.pi / 4
    paths: tuple[str, str] = ("I", "II")

    kind: ClassVar[str] = "BeamSplitter"
    unitary: ClassVar[bool] = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", _finite("mixing angle", self.theta))
        object.__setattr__(self, "paths", tuple(self.paths))

    def matrix(self, labels: Sequence[str]) -> np.ndarray:
        return beam_splitter_unitary(self.theta, labels, self.paths).entries


@dataclass(frozen=True)
class PhaseShifter:
    path: str
    phase: float = 0.0
    swept: bool = False

    kind: ClassVar[str] = "PhaseShifter"
    unitary: ClassVar[bool] = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "phase", _finite("phase", self.phase))

    def matrix(self, labels: Sequence[str]) -> np.ndarray:
        u = np.eye(len(labels), dtype=np.complex128)
        k = _index(labels, self.path)
        u[k, k] = np.exp(1j * self.phase)
        return u

    def with_phase(self, phase: float) -> "PhaseShifter":
        return replace(self, phase=phase)


@dataclass(frozen=True)
class Mirror:
    paths: tuple[str, str]

    kind: ClassVar[str] = "Mirror"
    unitary: ClassVar[bool] = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "paths", tuple(self.paths))

    def matrix(self, labels: Sequence[str]) -> np.ndarray:
        i, j = _pair_indices(labels, self.paths)
        u = np.eye(len(labels), dtype=np.complex128)
        u[[i, j]] = u[[j, i]]
        return u


@dataclass(frozen=True)
class Blocker:
    """Attenuates one path: amplitude scaled by √transmission."""

    path: str
    transmission: float = 0.0

    kind: ClassVar[str] = "Blocker"
    unitary: ClassVar[bool] = False

    def __post_init__(self) -> None:
        eta = _finite("transmission", self.transmission)
        if not 0.0 <= eta <= 1.0:
            raise InvalidElementError(f"Blocker transmission must lie in [0, 1], got {eta}")
        object.__setattr__(self, "transmission", eta)

    def matrix(self, labels: Sequence[str]) -> np.ndarray:
        m = np.eye(len(labels), dtype=np.complex128)
        k = _index(labels, self.path)
        m[k, k] = math.sqrt(self.transmission)
        return m


OpticalElement = BeamSplitter | PhaseShifter | Mirror | Blocker
