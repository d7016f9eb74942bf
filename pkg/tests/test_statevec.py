"""Tests for the state-vector core: construction, gates, measurement."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from icl_qproto.statevec import (
    ATOL,
    HADAMARD,
    IDENTITY2,
    SIGMA_X,
    SIGMA_Z,
    DimensionError,
    RandomSource,
    StateVector,
    ValidationError,
    apply_1q,
    apply_unitary,
    basis_state,
    branch_probabilities,
    computational_projectors,
    equal_up_to_global_phase,
    measure_projective,
    overlap,
    single_qubit,
    tensor,
)
from oracles import BELL, bell_branch_probabilities_oracle, kron_oracle, random_state, random_unitary


class TestStateVector:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValidationError):
            StateVector(1, np.array([1.0, 1.0]))

    def test_rejects_wrong_length(self):
        with pytest.raises(DimensionError):
            StateVector(2, np.array([1.0, 0.0]))

    def test_rejects_non_finite(self):
        with pytest.raises(ValidationError):
            StateVector(1, np.array([np.nan, 0.0]))

    def test_rejects_more_than_three_qubits(self):
        amps = np.zeros(16)
        amps[0] = 1.0
        with pytest.raises(DimensionError):
            StateVector(4, amps)

    def test_amplitudes_are_immutable(self):
        state = basis_state(1, 0)
        with pytest.raises(ValueError):
            state.amps[0] = 0.0

    def test_constructor_copies_its_input(self):
        amps = np.array([1.0 + 0j, 0.0])
        state = StateVector(1, amps)
        amps[0] = 5.0
        assert state.amps[0] == 1.0

    def test_json_round_trip(self):
        state = StateVector(2, BELL["psi-"])
        again = StateVector.from_json(state.to_json())
        assert again.isclose(state)
        assert state.to_json()["n"] == 2

    def test_from_amplitudes_infers_count(self):
        assert StateVector.from_amplitudes(BELL["phi+"]).qubit_count == 2
        with pytest.raises(DimensionError):
            StateVector.from_amplitudes(np.array([1.0, 0.0, 0.0]))


class TestTensor:
    def test_basis_product(self):
        result = tensor(basis_state(1, 0), basis_state(1, 0))
        np.testing.assert_allclose(result.amps, [1, 0, 0, 0], atol=1e-15)

    def test_one_zero_lands_on_index_two(self):
        result = tensor(basis_state(1, 1), basis_state(1, 0))
        np.testing.assert_allclose(result.amps, [0, 0, 1, 0], atol=1e-15)

    def test_qubit_with_bell_pair(self):
        alpha, beta = 0.6, 0.8j
        u = single_qubit(alpha, beta)
        result = tensor(u, StateVector(2, BELL["phi+"]))
        s = np.sqrt(2.0)
        expected = np.array([alpha / s, 0, 0, alpha / s, beta / s, 0, 0, beta / s])
        np.testing.assert_allclose(result.amps, expected, atol=1e-15)
        np.testing.assert_allclose(
            result.amps, kron_oracle(u.amps, BELL["phi+"]), atol=1e-15
        )

    def test_overflow_rejected(self):
        two = StateVector(2, BELL["phi+"])
        with pytest.raises(DimensionError):
            tensor(two, two)

    def test_associative_against_triple_loop(self):
        rng = np.random.default_rng(11)
        a, b, c = (StateVector(1, random_state(rng, 2)) for _ in range(3))
        left = tensor(tensor(a, b), c)
        right = tensor(a, tensor(b, c))
        flat = np.zeros(8, dtype=complex)
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    flat[4 * i + 2 * j + k] = a.amps[i] * b.amps[j] * c.amps[k]
        np.testing.assert_allclose(left.amps, flat, atol=1e-15)
        np.testing.assert_allclose(right.amps, flat, atol=1e-15)


class TestApply1q:
    def test_sigma_x_inverts(self):
        assert apply_1q(basis_state(1, 0), SIGMA_X, 1).isclose(basis_state(1, 1))

    def test_sigma_z_phases_one(self):
        result = apply_1q(basis_state(1, 1), SIGMA_Z, 1)
        np.testing.assert_allclose(result.amps, [0, -1], atol=1e-15)

    def test_sigma_x_on_first_qubit_of_phi_plus(self):
        result = apply_1q(StateVector(2, BELL["phi+"]), SIGMA_X, 1)
        np.testing.assert_allclose(result.amps, BELL["psi+"], atol=1e-15)

    def test_target_out_of_range(self):
        with pytest.raises(IndexError):
            apply_1q(basis_state(2, 0), SIGMA_X, 3)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValidationError):
            apply_1q(basis_state(1, 0), np.array([[1, 1], [0, 1]]), 1)

    def test_involutions(self):
        for gate in (SIGMA_X, SIGMA_Z, HADAMARD):
            np.testing.assert_allclose(gate @ gate, IDENTITY2, atol=1e-15)

    def test_norm_preserved_under_random_unitaries(self):
        rng = np.random.default_rng(23)
        for n in (1, 2, 3):
            state = StateVector(n, random_state(rng, 2**n))
            for target in range(1, n + 1):
                moved = apply_1q(state, random_unitary(rng, 2), target)
                assert abs(np.linalg.norm(moved.amps) - 1.0) < ATOL
            full = apply_unitary(state, random_unitary(rng, 2**n))
            assert abs(np.linalg.norm(full.amps) - 1.0) < ATOL


class TestOverlap:
    def test_normalization(self):
        phi = StateVector(2, BELL["phi+"])
        assert abs(overlap(phi, phi) - 1.0) < 1e-15

    def test_bell_orthogonality(self):
        assert abs(overlap(StateVector(2, BELL["phi+"]), StateVector(2, BELL["phi-"]))) < 1e-15

    def test_basis_orthogonality(self):
        assert overlap(basis_state(1, 0), basis_state(1, 1)) == 0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            overlap(basis_state(1, 0), basis_state(2, 0))


class TestGlobalPhase:
    def test_negated_state_matches(self):
        psi = StateVector(2, BELL["psi-"])
        assert equal_up_to_global_phase(psi, StateVector(2, -BELL["psi-"]))

    def test_orthogonal_states_do_not(self):
        assert not equal_up_to_global_phase(
            StateVector(2, BELL["phi+"]), StateVector(2, BELL["psi+"])
        )

    def test_imaginary_phase_matches(self):
        assert equal_up_to_global_phase(
            basis_state(1, 0), StateVector(1, np.array([1j, 0]))
        )

    @given(st.floats(min_value=0.0, max_value=2 * np.pi))
    def test_any_phase_matches(self, theta):
        rng = np.random.default_rng(5)
        amps = random_state(rng, 4)
        a = StateVector(2, amps)
        b = StateVector(2, np.exp(1j * theta) * amps)
        assert equal_up_to_global_phase(a, b)


class TestMeasureProjective:
    def test_eigenstate_is_certain(self):
        outcome, collapsed, prob = measure_projective(
            basis_state(1, 1), computational_projectors(1), RandomSource(0)
        )
        assert outcome == 1
        assert prob == pytest.approx(1.0, abs=1e-12)
        assert collapsed.isclose(basis_state(1, 1))

    def test_bell_projectors_on_joint_input_quarter_each(self):
        rng = np.random.default_rng(3)
        u = StateVector(1, random_state(rng, 2))
        joint = tensor(u, StateVector(2, BELL["phi+"]))
        projectors = [np.kron(np.outer(v, v.conj()), np.eye(2)) for v in BELL.values()]
        probs = branch_probabilities(joint, projectors)
        np.testing.assert_allclose(probs, 0.25, atol=1e-12)
        oracle = bell_branch_probabilities_oracle(joint.amps)
        np.testing.assert_allclose(sorted(oracle.values()), sorted(probs), atol=1e-12)

    def test_bell_projector_certain_on_phi_plus_with_ancilla(self):
        joint = tensor(StateVector(2, BELL["phi+"]), basis_state(1, 0))
        oracle = bell_branch_probabilities_oracle(joint.amps)
        assert oracle["phi+"] == pytest.approx(1.0, abs=1e-12)
        projectors = [np.kron(np.outer(v, v.conj()), np.eye(2)) for v in BELL.values()]
        outcome, collapsed, prob = measure_projective(joint, projectors, RandomSource(1))
        assert outcome == 0
        assert prob == pytest.approx(1.0, abs=1e-12)
        assert collapsed.isclose(joint)

    def test_rejects_non_resolution(self):
        p0 = np.diag([1.0, 0.0]).astype(complex)
        with pytest.raises(ValidationError):
            measure_projective(basis_state(1, 0), [p0, p0], RandomSource(0))

    def test_rejects_non_orthogonal(self):
        plus = np.full((2, 2), 0.5, dtype=complex)
        p0 = np.diag([1.0, 0.0]).astype(complex)
        with pytest.raises(ValidationError):
            measure_projective(basis_state(1, 0), [p0, plus], RandomSource(0))

    def test_probabilities_sum_to_one_and_collapse_normalized(self):
        rng = np.random.default_rng(17)
        for n in (1, 2, 3):
            state = StateVector(n, random_state(rng, 2**n))
            probs = branch_probabilities(state, computational_projectors(n))
            assert abs(probs.sum() - 1.0) < ATOL
            _, collapsed, _ = measure_projective(
                state, computational_projectors(n), RandomSource(4)
            )
            assert abs(np.linalg.norm(collapsed.amps) - 1.0) < ATOL

    def test_seeded_outcomes_reproduce(self):
        rng = np.random.default_rng(29)
        state = StateVector(2, random_state(rng, 4))
        runs = []
        for _ in range(2):
            rand = RandomSource(99)
            runs.append(
                [
                    measure_projective(state, computational_projectors(2), rand)[0]
                    for _ in range(20)
                ]
            )
        assert runs[0] == runs[1]


class TestRandomSource:
    def test_bit_for_bit_reproducible(self):
        a = RandomSource(1234)
        b = RandomSource(1234)
        assert [a.uniform() for _ in range(100)] == [b.uniform() for _ in range(100)]

    def test_different_seeds_differ(self):
        assert RandomSource(0).uniform() != RandomSource(1).uniform()
