"""Witness encoding: concatenated Steane code, traps, shared permutation, Pauli pad."""
import itertools
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from encoding.key import EncodingKey
from qsim.circuit import CliffordCircuit
from qsim.dense import (
    DenseMixture,
    DenseOperator,
    DenseState,
    check_cap,
    pauli_expectation,
)
from qsim.pauli import DimensionError, PauliString, commutes, pauli_matrix
from qsim.stabilizer import StabilizerState
from steane.code import encoder_circuit

logger = logging.getLogger(__name__)

# |0>, |+>, and (|0> - i|1>)/sqrt(2) = P^3 H |0>
TRAP_GATES = {
    "0": (),
    "+": (("H", 0),),
    "r": (("H", 0), ("P", 0), ("P", 0), ("P", 0)),
}


def trap_circuit(symbol: str) -> CliffordCircuit:
    return CliffordCircuit(1, TRAP_GATES[symbol])


def block_circuit(key: EncodingKey, i: int) -> CliffordCircuit:
    """Steane encoder on positions 0..N-1 and trap preparation on N..2N-1."""
    N = key.N
    width = key.block_size
    gates = list(encoder_circuit(key.code.t).embed(list(range(N)), width).gates)
    for j, symbol in enumerate(key.block_traps(i)):
        gates.extend(trap_circuit(symbol).embed([N + j], width).gates)
    return CliffordCircuit(width, tuple(gates))


def physical_permutation(key: EncodingKey) -> List[int]:
    """Register-wide map from (code || trap) positions to physical positions."""
    width = key.block_size
    return [i * width + key.perm[j] for i in range(key.n) for j in range(width)]


def encode_physical(logical: StabilizerState, key: EncodingKey) -> StabilizerState:
    if logical.n != key.n:
        raise DimensionError(f"logical state on {logical.n} qubits, key for {key.n}")
    width = key.block_size
    total = key.n * width
    state = logical.tensor(StabilizerState(total - key.n))
    placement = [i * width for i in range(key.n)] + [q for q in range(total) if q % width]
    state = state.permuted(placement)
    for i in range(key.n):
        state.apply(block_circuit(key, i).embed(list(range(i * width, (i + 1) * width)), total))
    state = state.permuted(physical_permutation(key))
    state.apply_pauli(key.pad_pauli())
    logger.debug(f"Encoded {key.n} logical qubit(s) into {total} physical qubits")
    return state


def unpad_and_unpermute(state: StabilizerState, key: EncodingKey) -> StabilizerState:
    """Inverse of the last two encoding steps."""
    out = state.copy()
    out.apply_pauli(key.pad_pauli())
    forward = physical_permutation(key)
    inverse = [0] * len(forward)
    for src, dest in enumerate(forward):
        inverse[dest] = src
    return out.permuted(inverse)


@dataclass(eq=False)
class EncodedWitness:
    key: EncodingKey
    logical: Optional[DenseState] = None
    physical: Optional[StabilizerState] = None

    @property
    def form(self) -> str:
        return "symbolic" if self.logical is not None else "physical"

    def to_json(self) -> Dict[str, Any]:
        if self.logical is None:
            raise ValueError("only the symbolic form serializes")
        amps = [[float(c.real), float(c.imag)] for c in self.logical.amplitudes]
        return {"form": self.form, "key": self.key.to_json(), "logical": {"k": self.logical.k, "amplitudes": amps}}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "EncodedWitness":
        amps = np.array([complex(re, im) for re, im in data["logical"]["amplitudes"]])
        return cls(EncodingKey.from_json(data["key"]), DenseState(int(data["logical"]["k"]), amps))


def encode_symbolic(logical: DenseState, key: EncodingKey) -> EncodedWitness:
    """Defer the physical expansion; the sampler evaluates the encoding blockwise."""
    check_cap(logical.k)
    if logical.k != key.n:
        raise DimensionError(f"logical state on {logical.k} qubits, key for {key.n}")
    return EncodedWitness(key=key, logical=logical)


def encode_honest(witness: DenseState, key: EncodingKey) -> EncodedWitness:
    """What an honest prover sends: at odd level the transversal gates act as C*, so encode psi*."""
    logical = witness.conj() if key.code.transversal_is_conjugate else witness
    return encode_symbolic(logical, key)


def _bits_to_int(bits: str) -> int:
    return sum(1 << j for j, ch in enumerate(bits) if ch == "1")


def soundness_decode(
    xi: Union[DenseState, DenseOperator, DenseMixture],
    perm: Sequence[int],
    a: str,
    b: str,
    N: int,
) -> DenseOperator:
    """Undo the claimed pad and permutation, drop traps, apply Xi_N per block.

    Each output Pauli coefficient is the expectation of the matching transversal
    Pauli on the code positions, read directly off ``xi`` with the pad's sign.
    """
    width = 2 * N
    if xi.k % width:
        raise DimensionError(f"{xi.k} qubits is not a whole number of {width}-qubit blocks")
    n = xi.k // width
    check_cap(n)
    pad = PauliString(xi.k, _bits_to_int(a), _bits_to_int(b))
    out = np.zeros((2**n, 2**n), dtype=complex)
    for letters in itertools.product("IXYZ", repeat=n):
        label = ["I"] * xi.k
        for i, letter in enumerate(letters):
            if letter != "I":
                for j in range(N):
                    label[i * width + perm[j]] = letter
        lifted = PauliString.from_label("".join(label))
        sign = 1 if commutes(pad, lifted) else -1
        out += sign * pauli_expectation(xi, lifted) * pauli_matrix(PauliString.from_label("".join(letters)))
    return DenseOperator(n, out / 2**n)


def qotp_twirl_check(rho: DenseOperator) -> DenseOperator:
    """Average of X^a Z^b rho (X^a Z^b)^dagger over the four pads."""
    if rho.k != 1:
        raise DimensionError("the twirl check acts on one qubit")
    acc = np.zeros((2, 2), dtype=complex)
    for x, z in itertools.product((0, 1), repeat=2):
        pad = pauli_matrix(PauliString(1, x, z))
        acc += pad @ rho.matrix @ pad.conj().T
    return DenseOperator(1, acc / 4)
