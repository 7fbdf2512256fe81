import numpy as np
import pytest

from encoding.encoder import encode_honest, encode_symbolic
from encoding.key import EncodingKey, sample_key
from lch.model import LchTerm
from protocol.machines import AdversaryConfig
from qsim.circuit import CliffordCircuit, conjugate_pauli, random_clifford
from qsim.dense import DenseState, dense_apply
from qsim.pauli import DimensionError, PauliString
from qsim.stabilizer import StabilizerState
from sampler.attacks import (
    AttackReport,
    attack_bound,
    estimate_beta,
    merge_reports,
    run_attack_experiment,
    trap_string,
    xor_attack_run,
)
from sampler.challenge import (
    ChallengeOutcome,
    acceptance_probability,
    challenge_distribution,
    challenge_outcome,
    column_distribution,
    logical_distribution,
    pad_shift,
    physical_distribution,
    trap_state,
    trap_support_shift,
)
from steane.code import D7_0, D7_1

IDENTITY_TERM = LchTerm(CliffordCircuit.identity(1), (0,))
ONE = DenseState.from_bits("1")


class TestColumns:
    def test_trap_state_vectors(self):
        assert np.allclose(trap_state("r").amplitudes, np.array([1, -1j]) / np.sqrt(2))

    def test_column_distribution(self):
        assert column_distribution(CliffordCircuit.identity(1), "0") == pytest.approx((1.0, 0.0))
        assert column_distribution(CliffordCircuit(1, (("H", 0),)), "+") == pytest.approx((1.0, 0.0))
        assert column_distribution(CliffordCircuit.identity(1), "r") == pytest.approx((0.5, 0.5))

    def test_support_shift(self):
        identity = CliffordCircuit.identity(1)
        assert trap_support_shift(identity, "0") == frozenset({"0"})
        assert trap_support_shift(identity, "+") == frozenset({"0", "1"})
        cnot = CliffordCircuit(2, (("CNOT", 0, 1),))
        # CNOT|+0> is a Bell state: outcomes 00 and 11
        assert trap_support_shift(cnot, "+0") == frozenset({"00", "11"})


class TestOutcomes:
    @pytest.mark.parametrize("bits,words", [("0", D7_0), ("1", D7_1)])
    def test_trivial_key(self, rng, bits, words):
        key = EncodingKey.trivial(1, 7)
        enc = encode_symbolic(DenseState.from_bits(bits), key)
        seen = set()
        for _ in range(200):
            outcome = challenge_outcome(enc, IDENTITY_TERM, key, rng)
            assert outcome.u[7:] == "0" * 7
            seen.add(outcome.u[:7])
        assert seen == set(words)

    def test_exact_distribution_is_uniform_over_codewords(self):
        key = EncodingKey.trivial(1, 7)
        dist = challenge_distribution(encode_symbolic(DenseState.zero(1), key), IDENTITY_TERM, key)
        assert set(dist) == {w + "0" * 7 for w in D7_0}
        assert all(p == pytest.approx(1 / 8) for p in dist.values())

    @pytest.mark.parametrize("seed", range(3))
    def test_symbolic_matches_physical(self, seed):
        rng = np.random.default_rng(seed)
        key = sample_key(1, 7, rng)
        logical = StabilizerState.zero(1)
        logical.apply(CliffordCircuit(1, (("H", 0),)))
        term = LchTerm(CliffordCircuit(1, (("P", 0), ("H", 0))), (0,))
        symbolic = challenge_distribution(encode_symbolic(logical.to_dense(), key), term, key)
        physical = physical_distribution(logical, term, key)
        assert set(symbolic) == set(physical)
        for u, p in physical.items():
            assert symbolic[u] == pytest.approx(p, abs=1e-9)

    def test_logical_distribution_uses_conjugate_at_odd_level(self):
        # P H |0> = |+i>; H P^3 |+i> = |0>, so at level 1 the logical outcome is 0 with certainty
        psi = dense_apply(DenseState.zero(1), [("H", 0), ("P", 0)])
        term = LchTerm(CliffordCircuit(1, (("P", 0), ("H", 0))), (0,))
        enc = encode_symbolic(psi, EncodingKey.trivial(1, 7))
        assert logical_distribution(enc, term) == pytest.approx([1.0, 0.0])

    def test_bad_support(self, rng):
        key = sample_key(1, 7, rng)
        with pytest.raises(DimensionError):
            challenge_outcome(encode_symbolic(ONE, key), LchTerm(CliffordCircuit.identity(1), (1,)), key, rng)
        with pytest.raises(DimensionError):
            ChallengeOutcome("", 1, (0,), 7, "0" * 13)

    def test_outcome_length_matches_code_size(self):
        outcome = ChallengeOutcome("", 1, (0, 1), 7, "0" * 14 + "1" * 14)
        assert outcome.blocks() == ["0" * 14, "1" * 14]
        # 14 bits is 2kN for k = 1 at level one, not at level two
        assert ChallengeOutcome("", 1, (0,), 7, "0" * 14).N == 7
        with pytest.raises(DimensionError):
            ChallengeOutcome("", 1, (0,), 49, "0" * 14)
        with pytest.raises(DimensionError):
            ChallengeOutcome("", 1, (0,), 7, "0" * 98)

    def test_outcome_carries_code_size(self, rng):
        key = sample_key(1, 49, rng)
        outcome = challenge_outcome(encode_symbolic(ONE, key), LchTerm(CliffordCircuit.identity(1), (0,)), key, rng)
        assert outcome.N == 49
        assert len(outcome.u) == 98

    def test_acceptance_probability(self, zero_penalty_instance):
        assert acceptance_probability(zero_penalty_instance, ONE, 1) == pytest.approx(1.0)
        assert acceptance_probability(zero_penalty_instance, DenseState.zero(1), 1) == pytest.approx(0.0)


class TestPadShift:
    def test_identity_keeps_pads(self, rng):
        a, b = "".join(rng.choice(["0", "1"], 14)), "".join(rng.choice(["0", "1"], 14))
        c, d, alpha = pad_shift(CliffordCircuit.identity(1), (0,), a, b, 7)
        assert (c, d, alpha) == (a, b, 1)

    def test_hadamard_swaps_pads(self):
        a, b = "1" + "0" * 13, "0" * 13 + "1"
        c, d, _ = pad_shift(CliffordCircuit(1, (("H", 0),)), (0,), a, b, 7)
        assert (c, d) == (b, a)

    def test_off_support_blocks_untouched(self):
        a, b = "1" * 28, "0" * 28
        c, d, _ = pad_shift(CliffordCircuit(1, (("H", 0),)), (1,), a, b, 7)
        assert c == "1" * 14 + "0" * 14
        assert d == "0" * 14 + "1" * 14

    def test_matches_conjugation(self, rng):
        cnot = CliffordCircuit(2, (("CNOT", 0, 1),))
        a = "".join(rng.choice(["0", "1"], 4))
        b = "".join(rng.choice(["0", "1"], 4))
        c, d, _ = pad_shift(cnot, (0, 1), a, b, 1)
        for pos in range(2):
            x = sum(1 << m for m in range(2) if a[2 * m + pos] == "1")
            z = sum(1 << m for m in range(2) if b[2 * m + pos] == "1")
            image = conjugate_pauli(cnot, PauliString(2, x, z))
            assert [c[2 * m + pos] for m in range(2)] == [str(bit) for bit in image.x_bits]
            assert [d[2 * m + pos] for m in range(2)] == [str(bit) for bit in image.z_bits]

    def test_bad_lengths(self):
        with pytest.raises(DimensionError):
            pad_shift(CliffordCircuit.identity(1), (0,), "0" * 13, "0" * 13, 7)


class TestTrapString:
    def test_examples(self):
        assert trap_string(CliffordCircuit.identity(1), 0) == "0"
        assert trap_string(CliffordCircuit(1, (("H", 0),)), 0) == "+"
        assert trap_string(CliffordCircuit(2, (("CNOT", 0, 1),)), 1) == "00"
        assert trap_string(CliffordCircuit(1, (("P", 0), ("H", 0))), 0) == "r"

    @pytest.mark.parametrize("seed", range(4))
    def test_qubit_left_in_basis_state(self, seed):
        rng = np.random.default_rng(seed)
        c = random_clifford(3, rng, length=20)
        for j in range(3):
            probs = dense_apply(trap_state(trap_string(c, j)), c).probabilities().reshape(2, 2, 2)
            marginal = np.moveaxis(probs, j, 0).reshape(2, -1).sum(axis=1)
            assert min(marginal) == pytest.approx(0.0, abs=1e-12)

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            trap_string(CliffordCircuit.identity(2), 2)


class TestAttacks:
    def test_bound_values(self):
        assert attack_bound(1, 3) == pytest.approx((8 / 9) ** 3)
        assert attack_bound(1, 3) == pytest.approx(0.70233, abs=1e-5)
        assert attack_bound(5, 9) == pytest.approx(0.99753, abs=1e-5)
        with pytest.raises(ValueError):
            attack_bound(0, 3)

    def test_zero_mask_keeps_honest_pass(self, rng):
        key = sample_key(1, 7, rng)
        enc = encode_honest(ONE, key)
        assert xor_attack_run(enc, IDENTITY_TERM, key, "0" * 14, rng) == 1

    def test_code_flip_is_caught(self, rng):
        key = sample_key(1, 7, rng)
        v = ["0"] * 14
        v[key.perm[0]] = "1"  # lands on code position 0
        enc = encode_honest(ONE, key)
        assert all(xor_attack_run(enc, IDENTITY_TERM, key, "".join(v), rng) == 0 for _ in range(20))

    def test_beta_of_zero_mask(self, rng):
        assert estimate_beta("0" * 14, 1, 7, 10, rng) == 1.0
        with pytest.raises(DimensionError):
            estimate_beta("0" * 13, 1, 7, 10, rng)

    def test_beta_single_bit(self, rng):
        v = "1" + "0" * 13
        assert estimate_beta(v, 1, 7, 3000, rng) == pytest.approx(1 / 3, abs=0.04)

    def test_merge_reports(self):
        merged = merge_reports([AttackReport("xor:w1", 100, 0.2, 0.0), AttackReport("xor:w1", 300, 0.4, 0.0)])
        assert merged.samples == 400
        assert merged.q_hat == pytest.approx(0.35)

    def test_experiment_single_bit(self):
        report = run_attack_experiment(
            ONE, IDENTITY_TERM, AdversaryConfig.parse("xor:w1"), t_level=1, samples=1500, seed=3, workers=2
        )
        assert report.samples == 1500
        assert report.bound is None
        assert report.q_hat == pytest.approx(1 / 3, abs=0.06)

    def test_heavier_masks_do_more_damage(self):
        light = run_attack_experiment(ONE, IDENTITY_TERM, AdversaryConfig.parse("xor:w1"), t_level=1, samples=800, seed=4)
        heavy = run_attack_experiment(ONE, IDENTITY_TERM, AdversaryConfig.parse("xor:w3"), t_level=1, samples=800, seed=4)
        assert heavy.bound == pytest.approx(attack_bound(1, 3))
        assert heavy.q_hat < light.q_hat
        assert heavy.q_hat <= heavy.bound

    @pytest.mark.slow
    def test_beta_single_bit_tight(self, rng):
        assert estimate_beta("1" + "0" * 13, 1, 7, 10_000, rng) == pytest.approx(1 / 3, abs=0.02)

    @pytest.mark.slow
    def test_damping_is_independent_of_the_witness(self):
        # q(v) / q(0) matches beta(v) for a witness passing always and one passing half the time
        plus = DenseState.from_vector([1, 1])
        v = AdversaryConfig.parse("xor:p3")
        beta = estimate_beta(v.mask(14, np.random.default_rng(0)), 1, 7, 10_000, np.random.default_rng(1))
        for witness in (ONE, plus):
            base = run_attack_experiment(witness, IDENTITY_TERM, AdversaryConfig(), t_level=1, samples=10_000, seed=5)
            hit = run_attack_experiment(witness, IDENTITY_TERM, v, t_level=1, samples=10_000, seed=6)
            assert hit.q_hat / base.q_hat == pytest.approx(beta, abs=3 * (hit.ci95 + base.ci95) / 1.96 + 0.02)
