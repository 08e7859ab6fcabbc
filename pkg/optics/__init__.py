from optics.elements import (
    BeamSplitter,
    Blocker,
    Mirror,
    OpticalElement,
    PhaseShifter,
    beam_splitter_unitary,
)
from optics.interferometer import (
    Arrangement,
    PropagationResult,
    fringe_scan,
    propagate,
    run_arrangement,
    visibility,
)

__all__ = [
    "Arrangement",
    "BeamSplitter",
    "Blocker",
    "Mirror",
    "OpticalElement",
    "PhaseShifter",
    "PropagationResult",
    "beam_splitter_unitary",
    "fringe_scan",
    "propagate",
    "run_arrangement",
    "visibility",
]
