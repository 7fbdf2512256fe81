"""Clifford circuits over {H, P, CNOT, X, Z} and their action on Pauli strings."""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.config import Config
from qsim.pauli import DimensionError, PauliString, commutes, pauli_multiply

# gate name -> arity
GATES: Dict[str, int] = {"H": 1, "P": 1, "X": 1, "Z": 1, "CNOT": 2}

Gate = Tuple  # (name, qubit, ...) e.g. ("CNOT", 0, 1)


@dataclass(frozen=True)
class CliffordCircuit:
    n: int
    gates: Tuple[Gate, ...] = ()

    def __post_init__(self):
        normalized = []
        for gate in self.gates:
            name, qubits = str(gate[0]).upper(), tuple(int(q) for q in gate[1:])
            if name not in GATES:
                raise ValueError(f"unsupported Clifford gate {name!r}")
            if len(qubits) != GATES[name]:
                raise ValueError(f"gate {name} takes {GATES[name]} qubit(s), got {qubits}")
            if len(set(qubits)) != len(qubits) or any(not 0 <= q < self.n for q in qubits):
                raise DimensionError(f"gate {name}{qubits} invalid on {self.n} qubits")
            normalized.append((name, *qubits))
        object.__setattr__(self, "gates", tuple(normalized))

    @classmethod
    def identity(cls, n: int) -> "CliffordCircuit":
        return cls(n)

    def __len__(self) -> int:
        return len(self.gates)

    def then(self, other: "CliffordCircuit") -> "CliffordCircuit":
        """Circuit that runs ``self`` first and ``other`` second."""
        if other.n != self.n:
            raise DimensionError(f"cannot compose circuits on {self.n} and {other.n} qubits")
        return CliffordCircuit(self.n, self.gates + other.gates)

    def inverse(self) -> "CliffordCircuit":
        gates: List[Gate] = []
        for gate in reversed(self.gates):
            gates.extend([("P", gate[1])] * 3 if gate[0] == "P" else [gate])
        return CliffordCircuit(self.n, tuple(gates))

    def conjugated(self) -> "CliffordCircuit":
        """Entry-wise complex conjugate: P becomes P^3, every other gate is real."""
        gates: List[Gate] = []
        for gate in self.gates:
            gates.extend([gate] * 3 if gate[0] == "P" else [gate])
        return CliffordCircuit(self.n, tuple(gates))

    def embed(self, targets: Sequence[int], n: int) -> "CliffordCircuit":
        """Relabel qubit ``j`` as ``targets[j]`` inside an n-qubit register."""
        if len(targets) != self.n:
            raise DimensionError(f"need {self.n} targets, got {len(targets)}")
        return CliffordCircuit(n, tuple((g[0], *(targets[q] for q in g[1:])) for g in self.gates))

    def to_json(self) -> Dict[str, object]:
        return {"n": self.n, "gates": [list(g) for g in self.gates]}

    @classmethod
    def from_json(cls, data: Dict[str, object]) -> "CliffordCircuit":
        return cls(int(data["n"]), tuple(tuple(g) for g in data.get("gates", [])))


def _conjugate_by_gate(gate: Gate, x: int, z: int, phase: int) -> Tuple[int, int, int]:
    name = gate[0]
    if name == "CNOT":
        c, t = gate[1], gate[2]
        x ^= ((x >> c) & 1) << t
        z ^= ((z >> t) & 1) << c
        return x, z, phase
    a = gate[1]
    xa, za = (x >> a) & 1, (z >> a) & 1
    if name == "H":
        phase += 2 * (xa & za)
        x = (x & ~(1 << a)) | (za << a)
        z = (z & ~(1 << a)) | (xa << a)
    elif name == "P":
        phase += xa
        z ^= xa << a
    elif name == "X":
        phase += 2 * za
    elif name == "Z":
        phase += 2 * xa
    return x, z, phase


def conjugate_pauli(c: CliffordCircuit, p: PauliString) -> PauliString:
    """Return ``C p C^dagger`` with exact phase."""
    if c.n != p.n:
        raise DimensionError(f"circuit on {c.n} qubits, Pauli on {p.n}")
    x, z, phase = p.x, p.z, p.phase
    for gate in c.gates:
        x, z, phase = _conjugate_by_gate(gate, x, z, phase)
    return PauliString(p.n, x, z, phase)


@dataclass(frozen=True)
class CliffordTableau:
    """Images of X_j and Z_j under conjugation by a Clifford circuit."""

    n: int
    x_images: Tuple[PauliString, ...]
    z_images: Tuple[PauliString, ...]

    @classmethod
    def from_circuit(cls, c: CliffordCircuit) -> "CliffordTableau":
        xs = tuple(conjugate_pauli(c, PauliString(c.n, x=1 << j)) for j in range(c.n))
        zs = tuple(conjugate_pauli(c, PauliString(c.n, z=1 << j)) for j in range(c.n))
        return cls(c.n, xs, zs)

    def is_symplectic(self) -> bool:
        images = list(self.x_images) + list(self.z_images)
        for i, p in enumerate(images):
            for j, q in enumerate(images):
                if j <= i:
                    continue
                anticommuting_pair = j == i + self.n and i < self.n
                if commutes(p, q) == anticommuting_pair:
                    return False
        return True

    def apply(self, p: PauliString) -> PauliString:
        """Conjugate ``p`` through the tableau (same result as ``conjugate_pauli``)."""
        if p.n != self.n:
            raise DimensionError(f"tableau on {self.n} qubits, Pauli on {p.n}")
        out = PauliString(self.n, phase=p.phase)
        for j in range(self.n):
            if (p.x >> j) & 1:
                out = pauli_multiply(out, self.x_images[j])
            if (p.z >> j) & 1:
                out = pauli_multiply(out, self.z_images[j])
        return out

    def key(self) -> Tuple[Tuple[int, int, int], ...]:
        return tuple((q.x, q.z, q.phase) for q in self.x_images + self.z_images)


def random_clifford(
    k: int, rng: np.random.Generator, length: Optional[int] = None
) -> CliffordCircuit:
    """Random gate word over {H, P, X, Z, CNOT}.

    Each of ``length`` gates is drawn uniformly from the single-qubit gates on a
    uniform qubit, or CNOT on a uniform ordered pair when k >= 2. Not Haar-uniform
    over the Clifford group, but every single-qubit class is reachable.
    """
    if not 1 <= k <= 6:
        raise ValueError(f"random_clifford supports 1 <= k <= 6, got {k}")
    length = Config.EXPERIMENT.random_clifford_word_length if length is None else length
    names = ["H", "P", "X", "Z"] + (["CNOT"] if k >= 2 else [])
    gates: List[Gate] = []
    for _ in range(length):
        name = names[int(rng.integers(len(names)))]
        if name == "CNOT":
            c, t = rng.choice(k, size=2, replace=False)
            gates.append((name, int(c), int(t)))
        else:
            gates.append((name, int(rng.integers(k))))
    return CliffordCircuit(k, tuple(gates))

