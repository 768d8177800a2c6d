import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import qpower.core as core
from qpower.core import (ControlledPhase, DenseOperator, DiagonalOperator,
                         PhaseCircuit, SinglePhase, StateVector, apply,
                         bits_from_index, canonical_phase,
                         circuit_to_diagonal, equal_superposition,
                         index_from_bits, random_unitary, wrap_angle)
from qpower.errors import (CapacityError, DimensionMismatchError,
                           UnitarityError)

from conftest import diag_phases_bruteforce, random_circuit, random_state


class TestEqualSuperposition:
    def test_one_qubit(self):
        v = equal_superposition(1)
        assert np.allclose(v.amps, [0.7071067811865476, 0.7071067811865476])

    def test_two_qubits(self):
        v = equal_superposition(2)
        assert np.allclose(v.amps, [0.5, 0.5, 0.5, 0.5])

    def test_normalised(self):
        v = equal_superposition(3)
        assert abs(np.sum(np.abs(v.amps) ** 2) - 1.0) < 1e-12

    def test_zero_qubits_rejected(self):
        with pytest.raises(CapacityError):
            equal_superposition(0)

    def test_memory_cap(self):
        with pytest.raises(CapacityError):
            equal_superposition(core.LIMITS.max_state_qubits + 1)


class TestApply:
    def test_identity_diagonal(self):
        v = random_state(3, seed=1)
        out = apply(DiagonalOperator(3, np.zeros(8)), v)
        assert np.allclose(out.amps, v.amps, atol=1e-15)

    def test_sign_flip(self):
        v = equal_superposition(1)
        out = apply(DiagonalOperator(1, [0.0, np.pi]), v)
        want = np.array([1.0, -1.0]) / np.sqrt(2)
        assert np.max(np.abs(out.amps - want)) < 1e-12

    @pytest.mark.parametrize("n", [2, 4, 7, 10])
    def test_circuit_matches_expanded_diagonal(self, n):
        c = random_circuit(n, n_single=5, n_controlled=4, seed=7 + n)
        v = random_state(n, seed=8 + n)
        via_gates = apply(c, v)
        via_diag = apply(circuit_to_diagonal(c), v)
        assert np.max(np.abs(via_gates.amps - via_diag.amps)) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            apply(DiagonalOperator(2, np.zeros(4)), equal_superposition(3))

    @pytest.mark.parametrize("seed", range(6))
    def test_norm_preserved_all_representations(self, seed):
        n = 3
        v = random_state(n, seed=seed)
        ops = [
            DiagonalOperator(n, np.random.default_rng(seed).uniform(
                -np.pi, np.pi, 8)),
            random_unitary(n, seed=seed),
            random_circuit(n, 4, 3, seed=seed),
        ]
        for op in ops:
            assert abs(apply(op, v).norm - 1.0) < 1e-12


class TestCircuitToDiagonal:
    def test_empty_circuit(self):
        d = circuit_to_diagonal(PhaseCircuit(2, ()))
        assert np.allclose(d.phases, [0, 0, 0, 0])

    def test_single_gate(self):
        d = circuit_to_diagonal(
            PhaseCircuit(1, (SinglePhase(0, 0.0, np.pi),)))
        assert np.allclose(d.phases, [0.0, np.pi])

    def test_controlled_gate_semantics(self):
        # control qubit 0, target qubit 1: only indices with bit0 = 1 move
        d = circuit_to_diagonal(
            PhaseCircuit(2, (ControlledPhase(0, 1, 0.3, 0.7),)))
        assert np.allclose(d.phases, [0.0, 0.3, 0.0, 0.7])

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_bruteforce_oracle(self, seed):
        c = random_circuit(5, n_single=6, n_controlled=6, seed=seed)
        got = circuit_to_diagonal(c).phases
        want = diag_phases_bruteforce(c)
        assert np.max(np.abs(wrap_angle(got - want))) < 1e-12

    def test_gate_order_irrelevant(self, rng):
        c = random_circuit(4, n_single=5, n_controlled=5, seed=3)
        base = circuit_to_diagonal(c).phases
        for _ in range(5):
            perm = rng.permutation(len(c.gates))
            shuffled = PhaseCircuit(4, tuple(c.gates[i] for i in perm))
            assert np.max(np.abs(circuit_to_diagonal(shuffled).phases
                                 - base)) < 1e-12

    def test_expansion_cap(self):
        with pytest.raises(CapacityError):
            circuit_to_diagonal(PhaseCircuit(6, ()), cap=5)


class TestPhaseCircuitValidation:
    def test_qubit_out_of_range(self):
        with pytest.raises(DimensionMismatchError):
            PhaseCircuit(2, (SinglePhase(2, 0.0, 0.1),))

    def test_control_equals_target(self):
        with pytest.raises(DimensionMismatchError):
            PhaseCircuit(2, (ControlledPhase(1, 1, 0.0, 0.1),))


class TestRandomUnitary:
    def test_unitarity(self):
        u = random_unitary(1, seed=0)
        dev = np.max(np.abs(u.entries.conj().T @ u.entries - np.eye(2)))
        assert dev < 1e-10

    def test_deterministic_in_seed(self):
        a = random_unitary(3, seed=42)
        b = random_unitary(3, seed=42)
        assert np.array_equal(a.entries, b.entries)

    def test_eigenvalue_moduli(self):
        u = random_unitary(3, seed=7)
        moduli = np.abs(np.linalg.eigvals(u.entries))
        assert np.max(np.abs(moduli - 1.0)) < 1e-8

    def test_dense_cap(self):
        with pytest.raises(CapacityError):
            random_unitary(core.LIMITS.max_dense_qubits + 1, seed=0)


class TestDenseOperator:
    def test_rejects_non_unitary(self):
        with pytest.raises(UnitarityError):
            DenseOperator(1, np.array([[1.0, 0.0], [0.0, 2.0]]))

    def test_rejects_bad_shape(self):
        with pytest.raises(DimensionMismatchError):
            DenseOperator(2, np.eye(3))


class TestBitHelpers:
    @given(st.integers(min_value=0, max_value=255))
    def test_roundtrip(self, x):
        assert index_from_bits(bits_from_index(x, 8)) == x

    def test_little_endian(self):
        assert bits_from_index(1, 3) == (1, 0, 0)
        assert bits_from_index(4, 3) == (0, 0, 1)


class TestCanonicalPhase:
    @pytest.mark.parametrize("seed", range(4))
    def test_same_ray_maps_to_same_vector(self, seed):
        v = random_state(3, seed=seed)
        rotated = StateVector(3, v.amps * np.exp(1j * 1.234))
        a = canonical_phase(v).amps
        b = canonical_phase(rotated).amps
        assert np.max(np.abs(a - b)) < 1e-12

    def test_leading_amp_real_positive(self):
        v = random_state(3, seed=9)
        c = canonical_phase(v).amps
        i = int(np.argmax(np.abs(c)))
        assert abs(c[i].imag) < 1e-12 and c[i].real > 0


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=-20.0, max_value=20.0,
                 allow_nan=False, allow_infinity=False))
def test_wrap_angle_range_and_equivalence(x):
    w = wrap_angle(x)
    assert -np.pi < w <= np.pi + 1e-12
    assert abs(np.exp(1j * w) - np.exp(1j * x)) < 1e-9
