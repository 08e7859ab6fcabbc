from detection.povm import (
    DetectorSpec,
    JointOutcome,
    OutcomePOVM,
    anticoincidence_effect,
    build_joint_povm,
    coincidence_probability,
    outcome_probabilities,
    path_projector,
    serial_correlation,
)
from detection.sampling import philox, sample_categorical, sample_events
from detection.theorem import TheoremReport, scan_superpositions, verify_reduction_theorem

__all__ = [
    "DetectorSpec",
    "JointOutcome",
    "OutcomePOVM",
    "TheoremReport",
    "anticoincidence_effect",
    "build_joint_povm",
    "coincidence_probability",
    "outcome_probabilities",
    "path_projector",
    "philox",
    "sample_categorical",
    "sample_events",
    "scan_superpositions",
    "serial_correlation",
    "verify_reduction_theorem",
]
