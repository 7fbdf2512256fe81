import itertools

import numpy as np
import pytest

from qsim.circuit import CliffordCircuit, CliffordTableau, conjugate_pauli, random_clifford
from qsim.dense import (
    CapExceededError,
    DenseOperator,
    DenseState,
    apply_pauli_to_vector,
    check_cap,
    circuit_unitary,
    dense_apply,
    embed_operator,
    partial_trace,
    pauli_expectation,
    random_density,
    random_pure_state,
    reduced_density,
)
from qsim.pauli import DimensionError, PauliString, commutes, pauli_matrix, pauli_multiply
from qsim.stabilizer import StabilizerState


def _all_paulis(n):
    for letters in itertools.product("IXYZ", repeat=n):
        yield PauliString.from_label("".join(letters))


class TestPauliAlgebra:
    def test_x_times_z_is_minus_i_y(self):
        x, z = PauliString.from_label("X"), PauliString.from_label("Z")
        product = pauli_multiply(x, z)
        assert product.label() == "Y"
        assert np.allclose(pauli_matrix(product), -1j * pauli_matrix(PauliString.from_label("Y")))

    @pytest.mark.parametrize("n", [1, 2])
    def test_product_matches_dense(self, n):
        for p in _all_paulis(n):
            for q in _all_paulis(n):
                assert np.allclose(pauli_matrix(p * q), pauli_matrix(p) @ pauli_matrix(q))

    def test_commutation_matches_dense(self):
        for p in _all_paulis(2):
            for q in _all_paulis(2):
                mp, mq = pauli_matrix(p), pauli_matrix(q)
                assert commutes(p, q) == np.allclose(mp @ mq, mq @ mp)

    def test_size_mismatch(self):
        with pytest.raises(DimensionError):
            pauli_multiply(PauliString.identity(1), PauliString.identity(2))

    def test_single_and_weight(self):
        p = PauliString.single(3, 1, "Y")
        assert p.label() == "IYI"
        assert p.weight == 1
        assert p.is_hermitian()
        with pytest.raises(DimensionError):
            PauliString.single(2, 2, "X")

    def test_json_round_trip(self):
        p = PauliString.from_label("XYZ", phase=2)
        assert PauliString.from_json(p.to_json()) == p

    def test_unknown_letter(self):
        with pytest.raises(ValueError):
            PauliString.from_label("XQ")


class TestConjugation:
    @pytest.mark.parametrize("seed", range(5))
    def test_matches_dense(self, seed):
        rng = np.random.default_rng(seed)
        c = random_clifford(3, rng, length=15)
        u = circuit_unitary(c)
        for p in _all_paulis(3):
            q = conjugate_pauli(c, p)
            assert np.allclose(u @ pauli_matrix(p) @ u.conj().T, pauli_matrix(q))

    def test_preserves_commutation(self, rng):
        c = random_clifford(2, rng)
        for p in _all_paulis(2):
            for q in _all_paulis(2):
                assert commutes(p, q) == commutes(conjugate_pauli(c, p), conjugate_pauli(c, q))

    def test_hadamard_swaps_x_and_z(self):
        h = CliffordCircuit(1, (("H", 0),))
        assert conjugate_pauli(h, PauliString.from_label("X")) == PauliString.from_label("Z")
        assert conjugate_pauli(h, PauliString.from_label("Z")) == PauliString.from_label("X")

    def test_phase_gate_maps_x_to_y(self):
        p = CliffordCircuit(1, (("P", 0),))
        assert conjugate_pauli(p, PauliString.from_label("X")) == PauliString.from_label("Y")

    def test_cnot_spreads_x_forward_and_z_backward(self):
        cnot = CliffordCircuit(2, (("CNOT", 0, 1),))
        assert conjugate_pauli(cnot, PauliString.from_label("XI")).label() == "XX"
        assert conjugate_pauli(cnot, PauliString.from_label("IZ")).label() == "ZZ"

    def test_inverse_and_conjugated(self, rng):
        c = random_clifford(2, rng)
        u = circuit_unitary(c)
        assert np.allclose(circuit_unitary(c.inverse()), u.conj().T)
        assert np.allclose(circuit_unitary(c.conjugated()), u.conj())

    def test_tableau_is_symplectic_and_agrees(self, rng):
        c = random_clifford(3, rng)
        tableau = CliffordTableau.from_circuit(c)
        assert tableau.is_symplectic()
        for p in _all_paulis(3):
            assert tableau.apply(p) == conjugate_pauli(c, p)

    def test_bad_gate(self):
        with pytest.raises(ValueError):
            CliffordCircuit(1, (("T", 0),))
        with pytest.raises(DimensionError):
            CliffordCircuit(2, (("CNOT", 0, 0),))

    def test_embed_relabels(self):
        c = CliffordCircuit(2, (("CNOT", 0, 1),)).embed([3, 1], 4)
        assert c.gates == (("CNOT", 3, 1),)


class TestDense:
    def test_qubit_zero_is_most_significant(self):
        state = DenseState.from_bits("10")
        assert state.amplitudes[2] == 1

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            DenseState(1, np.array([1, 1]))

    def test_cap(self):
        with pytest.raises(CapExceededError):
            check_cap(5, cap=4)

    def test_dense_apply_matches_unitary(self, rng):
        c = random_clifford(3, rng)
        psi = random_pure_state(3, rng)
        assert np.allclose(dense_apply(psi, c).amplitudes, circuit_unitary(c) @ psi.amplitudes)

    def test_pauli_on_vector_matches_matrix(self, rng):
        psi = random_pure_state(3, rng)
        for p in _all_paulis(3):
            assert np.allclose(apply_pauli_to_vector(psi.amplitudes, 3, p), pauli_matrix(p) @ psi.amplitudes)

    def test_pauli_expectation(self):
        plus = dense_apply(DenseState.zero(1), [("H", 0)])
        assert pauli_expectation(plus, PauliString.from_label("X")) == pytest.approx(1.0)
        assert pauli_expectation(plus.density(), PauliString.from_label("Z")) == pytest.approx(0.0)

    def test_reduced_density_of_product(self, rng):
        a, b = random_pure_state(1, rng), random_pure_state(2, rng)
        joint = a.tensor(b)
        assert np.allclose(reduced_density(joint, [0]).matrix, a.density().matrix)
        assert np.allclose(partial_trace(joint.density(), [1, 2]).matrix, b.density().matrix)

    def test_embed_operator_order(self):
        x = pauli_matrix(PauliString.from_label("X"))
        full = embed_operator(x, [1], 2)
        assert np.allclose(full, pauli_matrix(PauliString.from_label("IX")))

    def test_random_density_is_state(self, rng):
        assert random_density(2, rng).is_state()
        assert DenseOperator.maximally_mixed(2).is_state()


class TestStabilizer:
    def test_bell_state(self):
        s = StabilizerState.from_circuit(CliffordCircuit(2, (("H", 0), ("CNOT", 0, 1))))
        dist = s.outcome_distribution()
        assert dist == {"00": 0.5, "11": 0.5}
        assert s.stabilizer_sign(PauliString.from_label("XX")) == 1
        assert s.stabilizer_sign(PauliString.from_label("ZZ")) == 1
        assert s.stabilizer_sign(PauliString.from_label("ZI")) is None

    def test_from_bits_is_deterministic(self, rng):
        s = StabilizerState.from_bits("101")
        assert s.measure_all(rng) == "101"
        assert s.stabilizer_sign(PauliString.from_label("ZII")) == -1

    @pytest.mark.parametrize("seed", range(4))
    def test_matches_dense(self, seed):
        rng = np.random.default_rng(seed)
        c = random_clifford(3, rng, length=20)
        s = StabilizerState.from_circuit(c)
        psi = dense_apply(DenseState.zero(3), c)
        assert abs(abs(s.to_dense().overlap(psi)) - 1) < 1e-9
        probs = psi.probabilities()
        for bits, p in s.outcome_distribution().items():
            assert float(p) == pytest.approx(probs[int(bits, 2)])

    def test_same_state_ignores_generator_choice(self):
        a = StabilizerState.from_circuit(CliffordCircuit(2, (("H", 0), ("CNOT", 0, 1))))
        b = StabilizerState.from_circuit(CliffordCircuit(2, (("H", 1), ("CNOT", 1, 0))))
        assert a.same_state(b)
        assert not a.same_state(StabilizerState.zero(2))

    def test_forced_impossible_outcome(self):
        s = StabilizerState.zero(1)
        with pytest.raises(ValueError):
            s.measure(0, forced=1)

    def test_permuted_moves_qubits(self, rng):
        s = StabilizerState.from_bits("100").permuted([2, 0, 1])
        assert s.measure_all(rng) == "001"

    def test_tensor(self, rng):
        s = StabilizerState.from_bits("1").tensor(StabilizerState.from_bits("01"))
        assert s.measure_all(rng) == "101"

    def test_tableau_budget(self):
        with pytest.raises(CapExceededError):
            StabilizerState(8, max_qubits=4)
