import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import ARMS
from detection.povm import (
    DetectorSpec,
    JointOutcome,
    anticoincidence_effect,
    build_joint_povm,
    coincidence_probability,
    outcome_probabilities,
    path_projector,
    serial_correlation,
)
from detection.sampling import philox
from quantum.errors import (
    BasisMismatchError,
    InvalidParamsError,
    LayoutMismatchError,
    MissingOutcomeError,
)
from quantum.hilbert import DensityOperator, StateVector, basis_state, superpose
from quantum.random_ops import random_state
from scenarios.presets import serial_outcome_tree


def arm_povm(layout="b", eta1=1.0, eta2=1.0):
    return build_joint_povm(layout, [DetectorSpec("I", eta1), DetectorSpec("II", eta2)], ARMS)


def serial_povm(eta1=1.0, eta2=1.0):
    return build_joint_povm(
        "c", [DetectorSpec("I", eta1, transmitting=True), DetectorSpec("I", eta2)], ARMS
    )


def test_coincidence_effect_is_zero():
    povm = arm_povm()
    assert not np.any(povm["11"].matrix)


@pytest.mark.parametrize("layout", ["a", "b", "c"])
def test_families_are_complete_for_random_efficiencies(layout):
    rng = philox(8)
    for eta1, eta2 in rng.uniform(0.0, 1.0, size=(100, 2)):
        povm = serial_povm(eta1, eta2) if layout == "c" else arm_povm(layout, eta1, eta2)
        assert povm.completeness_residual() <= 1e-10


def test_single_arm_probabilities(arm_states):
    povm = arm_povm(eta1=0.8, eta2=0.3)
    psi = superpose(math.sqrt(0.25), arm_states[0], math.sqrt(0.75), arm_states[1])
    named = {povm.name(o): p for o, p in outcome_probabilities(povm, psi).items()}
    assert named["coincidence"] == 0.0
    assert named["D1"] == pytest.approx(0.8 * 0.25)
    assert named["D2"] == pytest.approx(0.3 * 0.75)
    assert named["none"] == pytest.approx(1 - 0.2 - 0.225)


def test_coincidence_vanishes_on_random_states():
    povm = arm_povm(eta1=0.9, eta2=0.7)
    rng = philox(21)
    for _ in range(50):
        assert coincidence_probability(povm, random_state(rng, 2, ARMS)) == 0.0


def test_mixed_state_coincidence_is_zero(arm_states):
    povm = arm_povm()
    rng = philox(2)
    for w in rng.uniform(0.0, 1.0, size=100):
        rho = DensityOperator.mixture([w, 1 - w], list(arm_states))
        assert coincidence_probability(povm, rho) <= 1e-12


def test_mixed_state_outcomes_sum_to_one(arm_states):
    povm = arm_povm(eta1=0.5, eta2=0.5)
    rho = DensityOperator.mixture([0.3, 0.7], list(arm_states))
    assert sum(outcome_probabilities(povm, rho).values()) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("w", [0.0, 0.2, 0.5, 0.9])
@pytest.mark.parametrize("phase", [0.0, math.pi / 2, math.pi, 3 * math.pi / 2])
def test_serial_detectors_at_unit_efficiency(arm_states, w, phase):
    c2 = math.sqrt(1 - w) * complex(math.cos(phase), math.sin(phase))
    psi = superpose(math.sqrt(w), arm_states[0], c2, arm_states[1])
    dist = serial_correlation(serial_povm(), psi)
    assert dist["first_only"] + dist["second_only"] <= 1e-12
    assert abs(dist["both"] + dist["none"] - 1.0) <= 1e-12
    assert dist["both"] == pytest.approx(w, abs=1e-12)


def test_serial_detectors_match_outcome_tree(arm_states):
    psi = superpose(math.sqrt(0.5), arm_states[0], math.sqrt(0.5), arm_states[1])
    dist = serial_correlation(serial_povm(0.5, 0.5), psi)
    tree = serial_outcome_tree(0.5, 0.5, 0.5)
    for name, p in tree.items():
        assert abs(dist[name] - p) <= 1e-12
    assert tree == {"both": 0.125, "first_only": 0.125, "second_only": 0.125, "none": 0.625}


def test_anticoincidence_effect_vanishes_at_unit_efficiency():
    effect = anticoincidence_effect(serial_povm())
    assert not np.any(effect.matrix)
    assert np.any(anticoincidence_effect(serial_povm(0.5, 0.5)).matrix)


def test_path_projector_covers_internal_labels():
    labels = ("I|up", "I|down", "II|up", "II|down")
    assert_allclose(np.diag(path_projector(labels, "I")).real, [1, 1, 0, 0])
    assert_allclose(np.diag(path_projector(labels, "II")).real, [0, 0, 1, 1])
    with pytest.raises(BasisMismatchError):
        path_projector(labels, "III")


def test_layout_mismatches():
    with pytest.raises(LayoutMismatchError):
        build_joint_povm("b", [DetectorSpec("I"), DetectorSpec("I")], ARMS)
    with pytest.raises(LayoutMismatchError):
        build_joint_povm("c", [DetectorSpec("I", transmitting=True), DetectorSpec("II")], ARMS)
    with pytest.raises(LayoutMismatchError):
        build_joint_povm("c", [DetectorSpec("I"), DetectorSpec("I")], ARMS)
    with pytest.raises(LayoutMismatchError):
        build_joint_povm("z", [DetectorSpec("I"), DetectorSpec("II")], ARMS)
    with pytest.raises(LayoutMismatchError):
        serial_correlation(arm_povm(), basis_state(ARMS, "I"))


def test_detector_efficiency_range():
    with pytest.raises(InvalidParamsError):
        DetectorSpec("I", 1.2)


def test_missing_outcome():
    with pytest.raises(MissingOutcomeError):
        arm_povm()["111"]


def test_outcome_keys_round_trip():
    outcome = JointOutcome((True, False))
    assert outcome.key == "10"
    assert JointOutcome.from_key("10") == outcome
    assert arm_povm().name(outcome) == "D1"


def test_dimension_mismatch_is_rejected():
    povm = arm_povm()
    with pytest.raises(ValueError):
        outcome_probabilities(povm, StateVector.from_amplitudes([1.0, 0.0, 0.0], ("a", "b", "c")))
