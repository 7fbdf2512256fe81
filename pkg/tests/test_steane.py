import pytest

from qsim.circuit import CliffordCircuit
from qsim.pauli import DimensionError, PauliString
from qsim.stabilizer import StabilizerState
from steane.code import (
    D7_0,
    D7_1,
    NotACodewordError,
    SteaneCode,
    dual_coset_shift,
    encoder_circuit,
    is_codeword,
    logical_decode,
    min_distance,
    sample_codeword,
    transversal,
    xor_bits,
)

LEVEL_1 = SteaneCode.level(1)
LEVEL_2 = SteaneCode.level(2)


def test_codeword_tables_are_cosets():
    assert len(set(D7_0)) == len(set(D7_1)) == 8
    assert not set(D7_0) & set(D7_1)
    # D_7^0 is closed under xor and D_7^1 = D_7^0 + 1111111
    for a in D7_0:
        for b in D7_0:
            assert xor_bits(a, b) in D7_0
    assert dual_coset_shift() == sorted(D7_1)


def test_parameters():
    assert LEVEL_1.N == 7
    assert LEVEL_2.N == 49
    assert min_distance(LEVEL_1) == 3
    assert min_distance(LEVEL_2) == 9
    assert LEVEL_1.transversal_is_conjugate
    assert not LEVEL_2.transversal_is_conjugate


def test_bad_level():
    with pytest.raises(ValueError):
        SteaneCode.level(0)


@pytest.mark.parametrize("word,bit", [(D7_0[3], 0), (D7_1[5], 1), ("1111111", 1), ("0000000", 0)])
def test_decode_level_1(word, bit):
    assert logical_decode(word, LEVEL_1) == bit


def test_decode_rejects_non_codewords():
    with pytest.raises(NotACodewordError):
        logical_decode("1000000", LEVEL_1)
    assert not is_codeword("1000000", LEVEL_1)
    with pytest.raises(DimensionError):
        logical_decode("000", LEVEL_1)


def test_decode_level_2_is_recursive():
    word = "".join(D7_1[0] if ch == "1" else D7_0[2] for ch in D7_1[4])
    assert logical_decode(word, LEVEL_2) == 1
    broken = "1" + word[1:] if word[0] == "0" else "0" + word[1:]
    assert not is_codeword(broken, LEVEL_2)


@pytest.mark.parametrize("bit", [0, 1])
def test_encoder_support_level_1(bit):
    state = StabilizerState.from_bits(str(bit) + "0" * 6)
    state.apply(encoder_circuit(1))
    dist = state.outcome_distribution()
    assert set(dist) == set(D7_1 if bit else D7_0)
    assert all(p == pytest.approx(1 / 8) for p in dist.values())


def test_encoder_level_2_samples_decode_to_zero(rng):
    state = StabilizerState.zero(49)
    state.apply(encoder_circuit(2))
    for _ in range(50):
        sample = state.copy().measure_all(rng)
        assert logical_decode(sample, LEVEL_2) == 0


@pytest.mark.parametrize("t,bit", [(1, 0), (1, 1), (2, 0), (2, 1)])
def test_sample_codeword(rng, t, bit):
    code = SteaneCode.level(t)
    for _ in range(20):
        assert logical_decode(sample_codeword(code, bit, rng), code) == bit


def test_transversal_spreads_gates():
    c = CliffordCircuit(2, (("CNOT", 0, 1),))
    t = transversal(c, 3)
    assert t.n == 6
    assert t.gates == (("CNOT", 0, 3), ("CNOT", 1, 4), ("CNOT", 2, 5))


def test_logical_action_of_transversal_phase():
    p = CliffordCircuit(1, (("P", 0),))
    assert LEVEL_1.logical_action(p).gates == (("P", 0),) * 3
    assert LEVEL_2.logical_action(p).gates == (("P", 0),)


def test_transversal_phase_acts_as_conjugate_at_level_1():
    # |+>_L, then transversal P: the logical state is P^3 |+>_L, stabilized by -Y-bar
    state = StabilizerState.zero(7)
    state.apply(CliffordCircuit(7, (("H", 0),)))
    state.apply(encoder_circuit(1))
    state.apply(transversal(CliffordCircuit(1, (("P", 0),)), 7))
    assert state.stabilizer_sign(PauliString.from_label("Y" * 7)) == 1
