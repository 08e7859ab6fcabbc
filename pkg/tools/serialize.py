"""
Language-neutral encodings: complex numbers as [re, im], matrices as
row-major nested lists of pairs, arrangements as ordered element records.
"""

from typing import Any

import numpy as np

from optics.elements import BeamSplitter, Blocker, Mirror, PhaseShifter
from optics.interferometer import Arrangement
from quantum.errors import ConfigError
from quantum.hilbert import Operator, StateVector


def complex_to_pair(c: complex) -> list[float]:
    c = complex(c)
    return [c.real, c.imag]


def pair_to_complex(pair: Any) -> complex:
    re, im = pair
    return complex(float(re), float(im))


def matrix_to_json(m: np.ndarray | Operator) -> list[list[list[float]]]:
    entries = m.entries if isinstance(m, Operator) else np.asarray(m)
    return [[complex_to_pair(x) for x in row] for row in entries]


def matrix_from_json(data: list[list[Any]]) -> Operator:
    return Operator(np.array([[pair_to_complex(x) for x in row] for row in data]))


def state_to_json(state: StateVector) -> dict[str, Any]:
    return {
        "basis": list(state.basis_labels),
        "amplitudes": [complex_to_pair(a) for a in state.amplitudes],
    }


def state_from_json(data: dict[str, Any]) -> StateVector:
    return StateVector.from_amplitudes(
        [pair_to_complex(a) for a in data["amplitudes"]], data["basis"]
    )


def element_to_dict(element: BeamSplitter | PhaseShifter | Mirror | Blocker) -> dict[str, Any]:
    match element:
        case BeamSplitter(theta=theta, paths=paths):
            return {"kind": element.kind, "theta": theta, "paths": list(paths)}
        case PhaseShifter(path=path, phase=phase, swept=swept):
            return {"kind": element.kind, "path": path, "phase": phase, "swept": swept}
        case Mirror(paths=paths):
            return {"kind": element.kind, "paths": list(paths)}
        case Blocker(path=path, transmission=eta):
            return {"kind": element.kind, "path": path, "transmission": eta}
    raise ConfigError(f"Unknown element {element!r}")


def arrangement_to_dict(arr: Arrangement) -> dict[str, Any]:
    return {
        "basis": list(arr.basis_labels),
        "layout": arr.layout,
        "elements": [element_to_dict(e) for e in arr.elements],
    }
