import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from conftest import ARMS, R, triple_loop_expectation
from detection.sampling import philox
from quantum.errors import (
    BasisMismatchError,
    CoefficientsNotNormalizedError,
    DimensionMismatchError,
    ExpectationOutOfRangeError,
    InvalidEffectError,
    InvalidStateError,
    NotOrthogonalError,
    NotPositiveError,
)
from quantum.hilbert import (
    DEFAULT_TOLERANCES,
    DensityOperator,
    Effect,
    Operator,
    StateVector,
    basis_state,
    expectation,
    expectation_mixed,
    kernel_member,
    superpose,
    validate_effect,
)
from quantum.random_ops import (
    constructed_kernel_effect,
    random_orthonormal_pair,
    random_psd_effect,
    random_state,
)

phases = st.floats(min_value=0.0, max_value=2 * math.pi, allow_nan=False)
weights = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


def test_state_rejects_unnormalized_amplitudes():
    with pytest.raises(InvalidStateError):
        StateVector(np.array([1.0, 1.0]), ARMS)


def test_state_rejects_label_count_mismatch():
    with pytest.raises(InvalidStateError):
        StateVector(np.array([1.0, 0.0, 0.0]), ARMS)


def test_state_rejects_duplicate_labels():
    with pytest.raises(InvalidStateError):
        StateVector(np.array([1.0, 0.0]), ("I", "I"))


def test_state_rejects_nan():
    with pytest.raises(InvalidStateError):
        StateVector(np.array([np.nan, 0.0]), ARMS)


def test_state_amplitudes_are_read_only():
    phi = basis_state(ARMS, "I")
    with pytest.raises(ValueError):
        phi.amplitudes[0] = 0.0


def test_amplitude_lookup_by_label():
    phi = StateVector.from_amplitudes([R, 1j * R], ARMS)
    assert phi.amplitude("II") == pytest.approx(1j * R)
    with pytest.raises(BasisMismatchError):
        phi.amplitude("III")


def test_from_amplitudes_normalizes_on_request():
    phi = StateVector.from_amplitudes([3.0, 4.0], ARMS, normalize=True)
    assert_allclose(phi.amplitudes, [0.6, 0.8])


def test_superpose_equal_weights(arm_states):
    psi = superpose(R, arm_states[0], R, arm_states[1])
    assert_allclose(psi.amplitudes, [R, R])


def test_superpose_rejects_non_orthogonal(arm_states):
    diagonal = StateVector.from_amplitudes([R, R], ARMS)
    with pytest.raises(NotOrthogonalError):
        superpose(R, arm_states[0], R, diagonal)


def test_superpose_rejects_unnormalized_coefficients(arm_states):
    with pytest.raises(CoefficientsNotNormalizedError):
        superpose(1.0, arm_states[0], 1.0, arm_states[1])


def test_superpose_rejects_basis_mismatch(arm_states):
    other = basis_state(("a", "b"), "a")
    with pytest.raises(BasisMismatchError):
        superpose(R, arm_states[0], R, other)


@given(w=weights, phase=phases)
def test_superposition_of_orthonormal_states_is_normed(w, phase):
    phi1, phi2 = basis_state(ARMS, "I"), basis_state(ARMS, "II")
    c2 = math.sqrt(1 - w) * complex(math.cos(phase), math.sin(phase))
    psi = superpose(math.sqrt(w), phi1, c2, phi2)
    assert abs(np.linalg.norm(psi.amplitudes) - 1.0) <= 1e-12



def test_superpose_three_dimensional_example():
    labels = ("e1", "e2", "e3")
    psi = superpose(0.6, basis_state(labels, "e1"), 0.8j, basis_state(labels, "e3"))
    assert_allclose(psi.amplitudes, [0.6, 0.0, 0.8j], atol=1e-15)
    assert psi.basis_labels == labels


@given(seed=st.integers(min_value=0, max_value=2**32), w=weights, phase=phases)
def test_superpose_is_componentwise_linear(seed, w, phase):
    rng = philox(seed)
    dim = int(rng.integers(2, 9))
    phi1, phi2 = random_orthonormal_pair(rng, dim)
    c1 = math.sqrt(w)
    c2 = math.sqrt(1 - w) * complex(math.cos(phase), math.sin(phase))
    psi = superpose(c1, phi1, c2, phi2)
    expected = c1 * phi1.amplitudes + c2 * phi2.amplitudes
    assert np.max(np.abs(psi.amplitudes - expected)) <= 1e-14


def test_effect_rejects_non_hermitian():
    with pytest.raises(InvalidEffectError):
        Effect(Operator(np.array([[0.5, 0.1], [0.0, 0.5]])))


def test_effect_rejects_negative_spectrum():
    with pytest.raises(NotPositiveError):
        Effect(Operator(np.diag([1.0, -1.0])))


def test_effect_rejects_spectrum_above_one():
    with pytest.raises(InvalidEffectError):
        Effect(Operator(np.diag([1.5, 0.0])))


def test_validate_effect_reports_without_raising():
    diagnostics = validate_effect(Operator(np.diag([1.0, -1.0])))
    assert diagnostics.hermitian
    assert not diagnostics.positive
    assert diagnostics.min_eigenvalue == pytest.approx(-1.0)


def test_expectation_of_identity_is_one():
    phi = StateVector.from_amplitudes([0.6, 0.8j], ARMS)
    assert expectation(Effect(Operator.identity(2)), phi) == pytest.approx(1.0)


def test_expectation_matches_triple_loop_oracle():
    rng = philox(11)
    for dim in range(2, 7):
        effect = random_psd_effect(rng, dim)
        phi = random_state(rng, dim)
        oracle = triple_loop_expectation(effect.matrix, phi.amplitudes)
        assert abs(oracle.imag) < 1e-12
        assert expectation(effect, phi) == pytest.approx(oracle.real, abs=1e-12)


def test_expectation_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        expectation(Effect(Operator.identity(3)), basis_state(ARMS, "I"))


def test_expectation_out_of_range_is_rejected():
    # passes construction under a loose tolerance, then exceeds 1
    loose = DEFAULT_TOLERANCES.with_overrides({"pos": 0.5})
    effect = Effect(Operator(np.diag([1.2, 0.0])), loose)
    with pytest.raises(ExpectationOutOfRangeError):
        expectation(effect, basis_state(ARMS, "I"))


def test_mixed_expectation_equals_pure_expectation():
    rng = philox(5)
    effect = random_psd_effect(rng, 4)
    phi = random_state(rng, 4)
    rho = DensityOperator.pure(phi)
    assert expectation_mixed(effect, rho) == pytest.approx(expectation(effect, phi), abs=1e-12)


def test_mixture_rejects_bad_weights(arm_states):
    with pytest.raises(InvalidStateError):
        DensityOperator.mixture([0.7, 0.7], list(arm_states))


def test_density_operator_rejects_wrong_trace():
    with pytest.raises(InvalidStateError):
        DensityOperator(Operator(np.diag([0.5, 0.4])))


def test_kernel_member_with_planted_kernel():
    rng = philox(3)
    psi1, psi2 = random_orthonormal_pair(rng, 5)
    effect = constructed_kernel_effect(rng, psi1, psi2)
    check = kernel_member(effect, psi1)
    assert check
    assert check.residual <= 1e-10 * effect.op.norm()


def test_kernel_member_outside_kernel():
    effect = Effect(Operator(np.diag([1.0, 0.0])))
    check = kernel_member(effect, basis_state(ARMS, "I"))
    assert not check
    assert check.residual == pytest.approx(1.0)


def test_kernel_member_rejects_indefinite_operator():
    with pytest.raises(NotPositiveError):
        kernel_member(Operator(np.diag([1.0, -1.0])), basis_state(ARMS, "I"))


@settings(max_examples=50, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    dim=st.integers(min_value=2, max_value=6),
)
def test_lemma_bound_dominates_image_norm(seed, dim):
    rng = philox(seed)
    effect = random_psd_effect(rng, dim)
    psi = random_state(rng, dim)
    check = kernel_member(effect, psi)
    assert check.residual <= check.lemma_bound + 1e-12


def test_tolerance_overrides():
    tol = DEFAULT_TOLERANCES.with_overrides({"kernel": 1e-8})
    assert tol.kernel == 1e-8
    assert tol.norm == DEFAULT_TOLERANCES.norm
    with pytest.raises(ValueError):
        DEFAULT_TOLERANCES.with_overrides({"bogus": 1.0})
    with pytest.raises(ValueError):
        DEFAULT_TOLERANCES.with_overrides({"kernel": -1.0})
