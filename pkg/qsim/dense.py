"""Dense state-vector / density-matrix backend.

Used as the brute-force oracle for every structured computation and for the
non-Clifford gates (controlled-P) of verification circuits. Qubit 0 is the most
significant bit of a basis index.
"""
import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from config.config import Config
from qsim.circuit import CliffordCircuit
from qsim.pauli import DimensionError, PauliString

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10

_S2 = 1 / np.sqrt(2)
ONE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "P": np.diag([1, 1j]).astype(complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
}
TWO_QUBIT = {
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "CP": np.diag([1, 1, 1, 1j]).astype(complex),  # controlled-P
    "HH": np.kron(ONE_QUBIT["H"], ONE_QUBIT["H"]),
}


class CapExceededError(ValueError):
    """Raised instead of allocating a register above the dense cap."""


def check_cap(k: int, cap: Optional[int] = None) -> None:
    cap = Config.dense_cap() if cap is None else cap
    if k > cap:
        raise CapExceededError(f"{k} qubits exceeds the dense cap of {cap}")


def gate_matrix(name: str) -> np.ndarray:
    name = name.upper()
    if name in ONE_QUBIT:
        return ONE_QUBIT[name]
    if name in TWO_QUBIT:
        return TWO_QUBIT[name]
    raise ValueError(f"unknown dense gate {name!r}")


def _apply_to_tensor(psi: np.ndarray, k: int, matrix: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Apply ``matrix`` to the given axes of a length-2^k vector."""
    m = len(qubits)
    tensor = psi.reshape([2] * k)
    tensor = np.moveaxis(tensor, list(qubits), list(range(m)))
    shape = tensor.shape
    tensor = (matrix @ tensor.reshape(2**m, -1)).reshape(shape)
    tensor = np.moveaxis(tensor, list(range(m)), list(qubits))
    return tensor.reshape(-1)


@dataclass(eq=False)
class DenseState:
    k: int
    amplitudes: np.ndarray

    def __post_init__(self):
        check_cap(self.k)
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.shape[0] != 2**self.k:
            raise DimensionError(f"{self.amplitudes.shape[0]} amplitudes for {self.k} qubits")
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1) > NORM_TOLERANCE:
            raise ValueError(f"state is not normalized (norm {norm})")

    @classmethod
    def zero(cls, k: int) -> "DenseState":
        return cls.from_bits("0" * k)

    @classmethod
    def from_bits(cls, bits: str) -> "DenseState":
        k = len(bits)
        check_cap(k)
        amps = np.zeros(2**k, dtype=complex)
        amps[int(bits, 2) if bits else 0] = 1
        return cls(k, amps)

    @classmethod
    def from_vector(cls, vector: Iterable[complex], normalize: bool = True) -> "DenseState":
        v = np.asarray(list(vector) if not isinstance(vector, np.ndarray) else vector, dtype=complex)
        if normalize:
            v = v / np.linalg.norm(v)
        return cls(int(round(np.log2(v.shape[0]))), v)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def density(self) -> "DenseOperator":
        return DenseOperator(self.k, np.outer(self.amplitudes, self.amplitudes.conj()))

    def conj(self) -> "DenseState":
        return DenseState(self.k, self.amplitudes.conj())

    def tensor(self, other: "DenseState") -> "DenseState":
        return DenseState(self.k + other.k, np.kron(self.amplitudes, other.amplitudes))

    def overlap(self, other: "DenseState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def apply(self, matrix: np.ndarray, qubits: Sequence[int]) -> "DenseState":
        return DenseState(self.k, _apply_to_tensor(self.amplitudes, self.k, matrix, qubits))


@dataclass(eq=False)
class DenseOperator:
    k: int
    matrix: np.ndarray

    def __post_init__(self):
        check_cap(self.k)
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.shape != (2**self.k, 2**self.k):
            raise DimensionError(f"operator shape {self.matrix.shape} for {self.k} qubits")

    @classmethod
    def maximally_mixed(cls, k: int) -> "DenseOperator":
        return cls(k, np.eye(2**k, dtype=complex) / 2**k)

    @classmethod
    def from_state(cls, state: DenseState) -> "DenseOperator":
        return state.density()

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def expectation(self, observable: np.ndarray) -> float:
        return float(np.real(np.trace(observable @ self.matrix)))

    def is_state(self, atol: float = 1e-9) -> bool:
        herm = np.allclose(self.matrix, self.matrix.conj().T, atol=atol)
        return herm and abs(self.trace() - 1) < atol and np.linalg.eigvalsh(self.matrix).min() > -atol


@dataclass(eq=False)
class DenseMixture:
    """Ensemble of pure states; stands in for density matrices too large to store."""

    k: int
    components: List[Tuple[float, DenseState]] = field(default_factory=list)

    def __post_init__(self):
        total = sum(w for w, _ in self.components)
        if abs(total - 1) > 1e-9 or any(w < 0 for w, _ in self.components):
            raise ValueError(f"mixture weights must be a probability vector (sum {total})")
        if any(s.k != self.k for _, s in self.components):
            raise DimensionError("mixture components disagree on qubit count")

    @classmethod
    def pure(cls, state: DenseState) -> "DenseMixture":
        return cls(state.k, [(1.0, state)])

    def to_operator(self) -> DenseOperator:
        matrix = sum(w * np.outer(s.amplitudes, s.amplitudes.conj()) for w, s in self.components)
        return DenseOperator(self.k, matrix)


DenseLike = Union[DenseState, DenseOperator]

GateSpec = Tuple  # ("H", q) | ("CP", c, t) | ...


def dense_apply(state: DenseState, gates: Union[CliffordCircuit, Iterable[GateSpec]]) -> DenseState:
    """Apply a gate sequence exactly, including the non-Clifford controlled-P."""
    if isinstance(gates, CliffordCircuit):
        if gates.n != state.k:
            raise DimensionError(f"circuit on {gates.n} qubits, state on {state.k}")
        gates = gates.gates
    amps = state.amplitudes
    for gate in gates:
        name, qubits = str(gate[0]).upper(), [int(q) for q in gate[1:]]
        matrix = gate_matrix(name)
        if matrix.shape[0] != 2 ** len(qubits):
            raise ValueError(f"gate {name} applied to {len(qubits)} qubit(s)")
        amps = _apply_to_tensor(amps, state.k, matrix, qubits)
    return DenseState(state.k, amps)


def circuit_unitary(c: CliffordCircuit) -> np.ndarray:
    check_cap(c.n)
    dim = 2**c.n
    columns = np.eye(dim, dtype=complex)
    out = np.empty((dim, dim), dtype=complex)
    for col in range(dim):
        vec = columns[:, col]
        for gate in c.gates:
            vec = _apply_to_tensor(vec, c.n, gate_matrix(gate[0]), gate[1:])
        out[:, col] = vec
    return out


def embed_operator(op: np.ndarray, support: Sequence[int], k: int) -> np.ndarray:
    """Full 2^k x 2^k matrix of ``op`` acting on ``support`` (in that order)."""
    check_cap(k)
    m = len(support)
    rest = [q for q in range(k) if q not in support]
    order = list(support) + rest
    inverse = [order.index(q) for q in range(k)]
    full = np.kron(op, np.eye(2 ** (k - m), dtype=complex)).reshape([2] * (2 * k))
    axes = inverse + [k + i for i in inverse]
    return full.transpose(axes).reshape(2**k, 2**k)


def _letters(count: int, offset: int = 0) -> List[str]:
    alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    return list(alphabet[offset : offset + count])


def partial_trace(op: DenseOperator, keep: Sequence[int]) -> DenseOperator:
    """Reduced operator on ``keep`` (output ordered as ``keep``)."""
    k = op.k
    rows = _letters(k)
    cols = _letters(k, offset=k)
    for q in range(k):
        if q not in keep:
            cols[q] = rows[q]
    spec = "".join(rows) + "".join(cols) + "->" + "".join(rows[q] for q in keep) + "".join(cols[q] for q in keep)
    reduced = np.einsum(spec, op.matrix.reshape([2] * (2 * k)))
    m = len(keep)
    return DenseOperator(m, reduced.reshape(2**m, 2**m))


def reduced_density(state: DenseLike, keep: Sequence[int]) -> DenseOperator:
    if isinstance(state, DenseOperator):
        return partial_trace(state, keep)
    m = len(keep)
    tensor = np.moveaxis(state.amplitudes.reshape([2] * state.k), list(keep), list(range(m)))
    block = tensor.reshape(2**m, -1)
    return DenseOperator(m, block @ block.conj().T)


def _dense_mask(bits: int, k: int) -> int:
    """Convert a qubit bitmask (bit j = qubit j) to a dense index mask."""
    return sum(1 << (k - 1 - j) for j in range(k) if (bits >> j) & 1)


def apply_pauli_to_vector(vector: np.ndarray, k: int, pauli: PauliString) -> np.ndarray:
    """Return ``pauli |vector>`` without building the 2^k x 2^k matrix.

    A 2-d array is treated as a stack of column vectors.
    """
    if pauli.n != k:
        raise DimensionError(f"Pauli on {pauli.n} qubits, vector on {k}")
    idx = np.arange(2**k)
    zmask, xmask = _dense_mask(pauli.z, k), _dense_mask(pauli.x, k)
    parity = np.zeros(2**k, dtype=np.int64)
    for b in range(k):
        if (zmask >> b) & 1:
            parity ^= (idx >> b) & 1
    sign = np.where(parity == 1, -1, 1).reshape((-1,) + (1,) * (np.ndim(vector) - 1))
    signed = vector * sign
    out = np.empty_like(signed)
    out[idx ^ xmask] = signed
    return (1j**pauli.phase) * out


def pauli_expectation(state: Union[DenseState, DenseOperator, DenseMixture], pauli: PauliString) -> float:
    """Real part of tr(P rho); exact for Hermitian P."""
    if isinstance(state, DenseMixture):
        return sum(w * pauli_expectation(s, pauli) for w, s in state.components)
    if isinstance(state, DenseState):
        return float(np.real(np.vdot(state.amplitudes, apply_pauli_to_vector(state.amplitudes, state.k, pauli))))
    return float(np.real(np.trace(apply_pauli_to_vector(state.matrix, state.k, pauli))))


def random_pure_state(k: int, rng: np.random.Generator) -> DenseState:
    v = rng.normal(size=2**k) + 1j * rng.normal(size=2**k)
    return DenseState.from_vector(v)


def random_density(k: int, rng: np.random.Generator, rank: int = 2) -> DenseOperator:
    weights = rng.dirichlet(np.ones(rank))
    mix = DenseMixture(k, [(float(w), random_pure_state(k, rng)) for w in weights])
    return mix.to_operator()


def trace_distance(a: DenseOperator, b: DenseOperator) -> float:
    eigs = np.linalg.eigvalsh(a.matrix - b.matrix)
    return float(0.5 * np.abs(eigs).sum())
