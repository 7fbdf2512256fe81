"""Exact sampling of the verifier's challenge outcomes from a symbolic encoding.

The transversal challenge acts blockwise: on the code part it acts logically
(as C, or as its entry-wise conjugate at odd concatenation level), and on each
trap position it acts on the k trap qubits that share that position across the
support blocks. The two parts are sampled independently and interleaved by
the shared permutation.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, List, Sequence, Tuple, Union

import numpy as np

from encoding.encoder import EncodedWitness, encode_physical
from encoding.key import EncodingKey
from lch.model import LchInstance, LchTerm
from lch.oracles import term_energy
from qsim.circuit import CliffordCircuit, CliffordTableau
from qsim.dense import DenseOperator, DenseState, circuit_unitary, dense_apply, reduced_density
from qsim.pauli import DimensionError, PauliString
from qsim.stabilizer import StabilizerState
from steane.code import D7_0, D7_1, sample_codeword, transversal, xor_bits

logger = logging.getLogger(__name__)

_TRAP_VECTORS = {
    "0": np.array([1, 0], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / np.sqrt(2),
    "r": np.array([1, -1j], dtype=complex) / np.sqrt(2),
}


@dataclass(frozen=True)
class ChallengeOutcome:
    r: str
    j: int
    support: Tuple[int, ...]
    N: int
    u: str
    logical: str = ""

    def __post_init__(self):
        expected = 2 * len(self.support) * self.N
        if len(self.u) != expected:
            raise DimensionError(f"|u| = {len(self.u)}, expected 2kN = {expected} (k = {len(self.support)}, N = {self.N})")

    def blocks(self) -> List[str]:
        width = 2 * self.N
        return [self.u[m * width : (m + 1) * width] for m in range(len(self.support))]


def trap_state(symbols: str) -> DenseState:
    vec = np.array([1], dtype=complex)
    for s in symbols:
        vec = np.kron(vec, _TRAP_VECTORS[s])
    return DenseState(len(symbols), vec)


@lru_cache(maxsize=4096)
def column_distribution(c: CliffordCircuit, column: str) -> Tuple[float, ...]:
    """Outcome probabilities of measuring C|column> for a k-qubit trap column."""
    return tuple(float(p) for p in dense_apply(trap_state(column), c).probabilities())


@lru_cache(maxsize=4096)
def trap_support_shift(c: CliffordCircuit, column: str) -> FrozenSet[str]:
    """Linear part of the support of C|column>: masks that keep every outcome possible."""
    k = len(column)
    support = [format(i, f"0{k}b") for i, p in enumerate(column_distribution(c, column)) if p > 1e-12]
    return frozenset(xor_bits(support[0], s) for s in support)


def logical_distribution(enc: EncodedWitness, term: LchTerm) -> np.ndarray:
    """Born probabilities of the logical challenge outcome on the term's support."""
    if enc.logical is None:
        raise ValueError("challenge sampling needs the symbolic form")
    action = enc.key.code.logical_action(term.clifford)
    local = reduced_density(enc.logical, term.support)
    u = circuit_unitary(action)
    probs = np.real(np.diag(u @ local.matrix @ u.conj().T))
    probs = np.clip(probs, 0, None)
    return probs / probs.sum()


def pad_shift(c: CliffordCircuit, support: Sequence[int], a: str, b: str, N: int) -> Tuple[str, str, complex]:
    """(c, d, alpha) with C^{(x)2N} X^a Z^b = alpha X^c Z^d C^{(x)2N}.

    Off-support blocks keep their pads. ``N`` fixes the block width 2N.
    """
    if len(a) != len(b) or len(a) % (2 * N):
        raise DimensionError(f"pads of length {len(a)}/{len(b)} do not split into {2 * N}-bit blocks")
    if c.n != len(support):
        raise DimensionError(f"clifford on {c.n} qubits, support of size {len(support)}")
    width = 2 * N
    tableau = CliffordTableau.from_circuit(c)
    cs, ds = list(a), list(b)
    power = 0
    for pos in range(width):
        x = sum(1 << m for m, blk in enumerate(support) if a[blk * width + pos] == "1")
        z = sum(1 << m for m, blk in enumerate(support) if b[blk * width + pos] == "1")
        image = tableau.apply(PauliString(len(support), x, z))
        power += image.phase
        for m, blk in enumerate(support):
            cs[blk * width + pos] = str((image.x >> m) & 1)
            ds[blk * width + pos] = str((image.z >> m) & 1)
    return "".join(cs), "".join(ds), 1j ** (power % 4)


def support_pad(key: EncodingKey, support: Sequence[int], bits: str) -> str:
    """Concatenate the support blocks of a register-wide pad string."""
    width = key.block_size
    return "".join(bits[blk * width : (blk + 1) * width] for blk in support)


def _sample_unpadded(
    enc: EncodedWitness, term: LchTerm, key: EncodingKey, rng: np.random.Generator
) -> Tuple[str, str]:
    """Honest outcome w before the pad shift, and the logical outcome."""
    k = term.k
    code = key.code
    probs = logical_distribution(enc, term)
    v = format(int(rng.choice(len(probs), p=probs)), f"0{k}b")
    ys = [sample_codeword(code, int(bit), rng) for bit in v]
    zs = [[""] * key.N for _ in range(k)]
    for j in range(key.N):
        column = "".join(key.block_traps(blk)[j] for blk in term.support)
        col_probs = column_distribution(term.clifford, column)
        outcome = format(int(rng.choice(len(col_probs), p=col_probs)), f"0{k}b")
        for m in range(k):
            zs[m][j] = outcome[m]
    w = "".join(key.permute(ys[m] + "".join(zs[m])) for m in range(k))
    return w, v


def challenge_outcome(
    enc: EncodedWitness, term: LchTerm, key: EncodingKey, rng: np.random.Generator, r: str = "", j: int = 0
) -> ChallengeOutcome:
    if term.k > 5:
        raise DimensionError(f"terms act on at most 5 qubits, got {term.k}")
    if any(s >= key.n for s in term.support):
        raise DimensionError(f"support {term.support} outside {key.n} logical qubits")
    w, v = _sample_unpadded(enc, term, key, rng)
    c, _, _ = pad_shift(term.clifford, term.support, key.a, key.b, key.N)
    u = xor_bits(w, support_pad(key, term.support, c))
    return ChallengeOutcome(r=r, j=j, support=term.support, N=key.N, u=u, logical=v)


def honest_unpadded_outcome(
    enc: EncodedWitness, term: LchTerm, key: EncodingKey, rng: np.random.Generator
) -> str:
    return _sample_unpadded(enc, term, key, rng)[0]


def challenge_distribution(enc: EncodedWitness, term: LchTerm, key: EncodingKey) -> Dict[str, float]:
    """Exact distribution of u by enumeration (level-1 codes only)."""
    if key.code.t != 1:
        raise ValueError("exact enumeration is limited to N = 7")
    k = term.k
    c, _, _ = pad_shift(term.clifford, term.support, key.a, key.b, key.N)
    shift = support_pad(key, term.support, c)
    columns = []
    for j in range(key.N):
        column = "".join(key.block_traps(blk)[j] for blk in term.support)
        probs = column_distribution(term.clifford, column)
        columns.append([(format(i, f"0{k}b"), p) for i, p in enumerate(probs) if p > 1e-15])
    out: Dict[str, float] = {}
    for idx, pv in enumerate(logical_distribution(enc, term)):
        if pv <= 1e-15:
            continue
        v = format(idx, f"0{k}b")
        code_choices = [D7_1 if bit == "1" else D7_0 for bit in v]
        p_code = pv / 8**k
        for ys in itertools.product(*code_choices):
            for trap_pick in itertools.product(*columns):
                p = p_code
                for _, pz in trap_pick:
                    p *= pz
                zs = ["".join(col[0][m] for col in trap_pick) for m in range(k)]
                w = "".join(key.permute(ys[m] + zs[m]) for m in range(k))
                u = xor_bits(w, shift)
                out[u] = out.get(u, 0.0) + p
    return out


def physical_distribution(logical: StabilizerState, term: LchTerm, key: EncodingKey) -> Dict[str, float]:
    """Distribution of u from the full stabilizer simulation of the encoded state."""
    state = encode_physical(logical, key)
    width = key.block_size
    state.apply(transversal(term.clifford.embed(list(term.support), key.n), width))
    out: Dict[str, float] = {}
    for bits, p in state.outcome_distribution().items():
        u = "".join(bits[blk * width : (blk + 1) * width] for blk in term.support)
        out[u] = out.get(u, 0.0) + float(p)
    return out


def acceptance_probability(inst: LchInstance, rho: Union[DenseState, DenseOperator], j: int) -> float:
    """1 - tr(H_j rho) for the 1-based term index j."""
    return 1.0 - term_energy(inst.term(j), rho)
