import json

import numpy as np
import pandas as pd
import pytest

from analysis.reports import (
    DistributionReport,
    compare_real_vs_simulated,
    compare_transcript_sets,
    feature_frame,
    histogram,
    total_variation,
)
from analysis.simulator import SimulatorConfig, prepare_rho_r, simulate_many, zk_simulate
from analysis.soundness import (
    SoundnessViolation,
    choi_matrix,
    is_completely_positive,
    projectors,
    soundness_check,
    xi_adjoint,
    xi_apply,
)
from encoding.encoder import encode_physical
from encoding.key import sample_key
from lch.model import LchInstance, LchTerm
from lch.oracles import term_energy
from protocol.machines import AdversaryConfig
from protocol.messages import WITNESS_COMMITMENT, validate_order
from protocol.session import run_many
from qsim.circuit import CliffordCircuit
from qsim.dense import DenseMixture, DenseOperator, DenseState, random_density, random_pure_state
from qsim.pauli import DimensionError, PauliString, pauli_matrix
from qsim.stabilizer import StabilizerState

GOOD_TWO_TERM_WITNESS = DenseState.from_vector(np.kron([0, 1], [1, -1]))
ONE = DenseState.from_bits("1")


class TestProjectors:
    def test_level_one_ranks(self):
        pi0, pi1, d0, d1 = projectors(7)
        assert np.trace(pi0).real == pytest.approx(8)
        assert np.trace(pi1).real == pytest.approx(8)
        assert np.allclose(d0 + d1, np.eye(128))
        assert np.allclose(pi0 @ pi1, 0)
        # Pi_b sits inside the parity-b subspace
        assert np.linalg.eigvalsh(d0 - pi0).min() >= -1e-12
        assert np.linalg.eigvalsh(d1 - pi1).min() >= -1e-12

    def test_repetition_case(self):
        pi0, pi1, d0, d1 = projectors(1)
        assert np.allclose(pi0, d0)
        assert np.allclose(pi1, d1)

    def test_unsupported_size(self):
        with pytest.raises(ValueError):
            projectors(5)


class TestDecodingChannel:
    def test_single_qubit_is_identity(self, rng):
        rho = random_density(1, rng)
        assert np.allclose(xi_apply(rho).matrix, rho.matrix)

    def test_adjoint_of_zero_projector(self):
        tau = np.diag([1, 0]).astype(complex)
        z5 = pauli_matrix(PauliString.from_label("Z" * 5))
        assert np.allclose(xi_adjoint(tau, 5), (np.eye(32) + z5) / 2)

    def test_trace_preserving(self, rng):
        rho = random_density(3, rng)
        assert xi_apply(rho).trace() == pytest.approx(1.0)

    def test_adjoint_relation(self, rng):
        sigma = random_density(3, rng).matrix
        tau = random_density(1, rng).matrix
        lhs = np.trace(tau @ xi_apply(DenseOperator(3, sigma)).matrix)
        rhs = np.trace(xi_adjoint(tau, 3) @ sigma)
        assert lhs == pytest.approx(rhs)

    @pytest.mark.parametrize("N,expected", [(1, True), (3, False), (5, True)])
    def test_complete_positivity(self, N, expected):
        assert is_completely_positive(N) == expected

    def test_choi_shape(self):
        assert choi_matrix(2).shape == (8, 8)
        with pytest.raises(ValueError):
            choi_matrix(8)


class TestSoundnessCheck:
    @pytest.mark.parametrize("bits,expected", [("0", 1.0), ("1", 0.0)])
    def test_honest_encoding(self, rng, zero_penalty_instance, bits, expected):
        key = sample_key(1, 7, rng)
        xi = encode_physical(StabilizerState.from_bits(bits), key).to_dense()
        reject, bound = soundness_check(zero_penalty_instance, xi, key.perm, key.a, key.b, 1)
        assert reject == pytest.approx(expected, abs=1e-9)
        assert bound == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("seed", range(3))
    def test_rejection_dominates_energy_on_random_states(self, zero_penalty_instance, seed):
        rng = np.random.default_rng(seed)
        key = sample_key(1, 7, rng)
        xi = random_pure_state(14, rng)
        reject, bound = soundness_check(zero_penalty_instance, xi, key.perm, key.a, key.b, 1)
        assert reject >= bound - 1e-9

    @pytest.mark.slow
    @pytest.mark.parametrize("term", ["zero", "plus"])
    def test_rejection_dominates_energy_on_random_mixed_states(self, term):
        clifford = CliffordCircuit.identity(1) if term == "zero" else CliffordCircuit(1, (("H", 0),))
        inst = LchInstance(n=1, terms=(LchTerm(clifford, (0,), term),), p=2, q=1)
        rng = np.random.default_rng(77)
        for _ in range(100):
            key = sample_key(1, 7, rng)
            weights = rng.dirichlet(np.ones(2))
            xi = DenseMixture(14, [(float(w), random_pure_state(14, rng)) for w in weights])
            reject, bound = soundness_check(inst, xi, key.perm, key.a, key.b, 1)
            assert reject >= bound - 1e-9

    def test_violation_raises(self, rng, monkeypatch, zero_penalty_instance):
        key = sample_key(1, 7, rng)
        xi = encode_physical(StabilizerState.from_bits("1"), key).to_dense()
        monkeypatch.setattr("analysis.soundness.term_energy", lambda term, rho: 0.5)
        with pytest.raises(SoundnessViolation):
            soundness_check(zero_penalty_instance, xi, key.perm, key.a, key.b, 1)

    def test_size_check(self, rng, zero_penalty_instance):
        key = sample_key(1, 7, rng)
        with pytest.raises(DimensionError):
            soundness_check(zero_penalty_instance, DenseState.zero(13), key.perm, key.a, key.b, 1)


class TestSimulator:
    def test_prepared_state_passes_its_term(self, two_term_instance):
        first = prepare_rho_r(two_term_instance, 1)
        second = prepare_rho_r(two_term_instance, 2)
        assert term_energy(two_term_instance.term(1), first) == pytest.approx(0.0, abs=1e-12)
        assert term_energy(two_term_instance.term(2), first) == pytest.approx(0.5)
        assert term_energy(two_term_instance.term(2), second) == pytest.approx(0.0, abs=1e-12)
        assert term_energy(two_term_instance.term(1), second) == pytest.approx(1.0)

    @pytest.mark.parametrize("use_coin_flip", [True, False])
    def test_simulated_transcripts_accept(self, two_term_instance, use_coin_flip):
        cfg = SimulatorConfig(two_term_instance, t_level=1, use_coin_flip=use_coin_flip)
        for seed in range(4):
            t = zk_simulate(cfg, np.random.default_rng(seed))
            assert t.accepted
            assert validate_order(t.messages)
            assert t.find(WITNESS_COMMITMENT).payload["commitment"]["backend"] == "transparent"

    def test_simulate_many(self, two_term_instance):
        cfg = SimulatorConfig(two_term_instance, samples=5, t_level=1)
        transcripts = simulate_many(cfg, seed=3, workers=2)
        assert len(transcripts) == 5
        assert [t.to_jsonl() for t in transcripts] == [t.to_jsonl() for t in simulate_many(cfg, seed=3, workers=2)]

    def test_unsupported_adversary(self, two_term_instance):
        with pytest.raises(ValueError):
            SimulatorConfig(two_term_instance, AdversaryConfig(kind="liar"))


class TestReports:
    def test_total_variation(self):
        p = pd.Series({"a": 0.5, "b": 0.5})
        assert total_variation(p, p) == pytest.approx(0.0)
        assert total_variation(p, pd.Series({"c": 1.0})) == pytest.approx(1.0)
        assert total_variation(p, pd.Series({"a": 1.0})) == pytest.approx(0.5)

    def test_empty_histogram(self):
        assert histogram(feature_frame([])).empty

    def test_features(self, zero_penalty_instance):
        transcripts = run_many(zero_penalty_instance, DenseState.from_bits("1"), samples=3, seed=0, workers=1, t_level=1)
        frame = feature_frame(transcripts)
        assert list(frame.columns) == ["r", "response", "verdict"]
        assert set(frame["verdict"]) == {"accept"}
        report = compare_transcript_sets(transcripts, transcripts)
        assert report.tv == pytest.approx(0.0)

    def test_real_and_simulated_are_close(self, two_term_instance):
        cfg = SimulatorConfig(two_term_instance, t_level=1)
        report = compare_real_vs_simulated(GOOD_TWO_TERM_WITNESS, cfg, samples=300, seed=1, workers=2)
        assert report.samples == 300
        assert report.tv < 0.15
        assert sum(report.real.values()) == pytest.approx(1.0)

    @pytest.mark.slow
    @pytest.mark.parametrize("adversary", ["honest", "xor:w1", "xor:p0,3", "wrong-term:1", "wrong-term:2"])
    def test_real_and_simulated_agree_at_ten_thousand_samples(self, two_term_instance, adversary):
        cfg = SimulatorConfig(two_term_instance, AdversaryConfig.parse(adversary), t_level=1)
        report = compare_real_vs_simulated(GOOD_TWO_TERM_WITNESS, cfg, samples=10_000, seed=11, workers=4)
        assert report.samples == 10_000
        assert report.tv <= 0.03

    @pytest.mark.slow
    def test_distance_detects_a_failing_witness(self, zero_penalty_instance):
        # without a witness the real prover passes half the time, the simulator always
        cfg = SimulatorConfig(zero_penalty_instance, t_level=1)
        report = compare_real_vs_simulated(None, cfg, samples=10_000, seed=12, workers=4)
        assert report.tv >= 0.2
        assert report.tv == pytest.approx(0.5, abs=0.05)

    @pytest.mark.slow
    def test_distance_separates_two_witnesses(self, zero_penalty_instance):
        good = run_many(zero_penalty_instance, ONE, samples=10_000, seed=13, workers=4, t_level=1)
        guessed = run_many(zero_penalty_instance, None, samples=10_000, seed=14, workers=4, t_level=1)
        assert compare_transcript_sets(good, guessed).tv >= 0.2

    @pytest.mark.parametrize("backend", ["hash", "transparent"])
    def test_real_sessions_take_a_backend(self, monkeypatch, zero_penalty_instance, backend):
        seen = []
        original = run_many

        def recording_run_many(*args, **kwargs):
            seen.append(kwargs.get("backend"))
            return original(*args, **kwargs)

        monkeypatch.setattr("analysis.reports.run_many", recording_run_many)
        cfg = SimulatorConfig(zero_penalty_instance, t_level=1)
        report = compare_real_vs_simulated(ONE, cfg, samples=5, seed=0, workers=1, backend=backend)
        assert seen == [backend]
        assert report.tv == pytest.approx(0.0)

    def test_report_file(self, tmp_path):
        report = DistributionReport({"0|npzk|accept": 1.0}, {"0|npzk|accept": 1.0}, 0.0, 10)
        report.save(tmp_path / "report.json")
        assert json.loads((tmp_path / "report.json").read_text())["samples"] == 10
