"""CHP-style stabilizer simulator with a column-major bit-packed tableau.

Rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers. For every qubit ``q``
the integers ``_x[q]`` and ``_z[q]`` hold that qubit's x/z bit of every row, so a
gate touches one or two Python ints regardless of n. Row phases follow the
PauliString convention (power of i) and are kept as two bit-planes.
"""
import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.config import Config
from qsim.circuit import CliffordCircuit, Gate
from qsim.dense import CapExceededError, DenseState, apply_pauli_to_vector, check_cap
from qsim.pauli import DimensionError, PauliString, pauli_multiply

logger = logging.getLogger(__name__)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class StabilizerState:
    def __init__(self, n: int, max_qubits: Optional[int] = None):
        limit = Config.STABILIZER.max_qubits if max_qubits is None else max_qubits
        if n > limit:
            raise CapExceededError(f"{n} qubits exceeds the tableau budget of {limit}")
        self.n = n
        self._x: List[int] = [1 << q for q in range(n)]
        self._z: List[int] = [1 << (n + q) for q in range(n)]
        self._lo = 0
        self._hi = 0

    # construction -----------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "StabilizerState":
        return cls(n)

    @classmethod
    def from_bits(cls, bits: str) -> "StabilizerState":
        s = cls(len(bits))
        for q, ch in enumerate(bits):
            if ch == "1":
                s.apply_gate(("X", q))
        return s

    @classmethod
    def from_circuit(cls, c: CliffordCircuit) -> "StabilizerState":
        s = cls(c.n)
        s.apply(c)
        return s

    @classmethod
    def from_rows(
        cls, destabilizers: Sequence[PauliString], stabilizers: Sequence[PauliString]
    ) -> "StabilizerState":
        n = len(stabilizers)
        if len(destabilizers) != n or any(p.n != n for p in list(destabilizers) + list(stabilizers)):
            raise DimensionError("need n destabilizers and n stabilizers on n qubits")
        s = cls(n)
        for r, p in enumerate(list(destabilizers) + list(stabilizers)):
            s._set_row(r, p)
        return s

    def copy(self) -> "StabilizerState":
        out = StabilizerState.__new__(StabilizerState)
        out.n = self.n
        out._x = list(self._x)
        out._z = list(self._z)
        out._lo, out._hi = self._lo, self._hi
        return out

    # rows -------------------------------------------------------------------

    def row(self, r: int) -> PauliString:
        x = z = 0
        for j in range(self.n):
            x |= ((self._x[j] >> r) & 1) << j
            z |= ((self._z[j] >> r) & 1) << j
        phase = ((self._lo >> r) & 1) | (((self._hi >> r) & 1) << 1)
        return PauliString(self.n, x, z, phase)

    def _set_row(self, r: int, p: PauliString) -> None:
        bit = 1 << r
        for j in range(self.n):
            self._x[j] = (self._x[j] | bit) if (p.x >> j) & 1 else (self._x[j] & ~bit)
            self._z[j] = (self._z[j] | bit) if (p.z >> j) & 1 else (self._z[j] & ~bit)
        self._lo = (self._lo | bit) if p.phase & 1 else (self._lo & ~bit)
        self._hi = (self._hi | bit) if p.phase & 2 else (self._hi & ~bit)

    @property
    def stabilizers(self) -> Tuple[PauliString, ...]:
        return tuple(self.row(self.n + i) for i in range(self.n))

    @property
    def destabilizers(self) -> Tuple[PauliString, ...]:
        return tuple(self.row(i) for i in range(self.n))

    # gates ------------------------------------------------------------------

    def _add_phase(self, mask: int, k: int) -> None:
        if k & 1:
            carry = self._lo & mask
            self._lo ^= mask
            self._hi ^= carry
        if k & 2:
            self._hi ^= mask

    def apply_gate(self, gate: Gate) -> None:
        name = gate[0]
        if name == "CNOT":
            c, t = gate[1], gate[2]
            self._x[t] ^= self._x[c]
            self._z[c] ^= self._z[t]
            return
        a = gate[1]
        if name == "H":
            self._hi ^= self._x[a] & self._z[a]
            self._x[a], self._z[a] = self._z[a], self._x[a]
        elif name == "P":
            self._add_phase(self._x[a], 1)
            self._z[a] ^= self._x[a]
        elif name == "X":
            self._hi ^= self._z[a]
        elif name == "Z":
            self._hi ^= self._x[a]
        else:
            raise ValueError(f"unsupported Clifford gate {name!r}")

    def apply(self, c: CliffordCircuit) -> None:
        if c.n != self.n:
            raise DimensionError(f"circuit on {c.n} qubits, state on {self.n}")
        for gate in c.gates:
            self.apply_gate(gate)

    def apply_pauli(self, p: PauliString) -> None:
        """Conjugate every row by ``p`` (global phase of ``p`` is irrelevant)."""
        if p.n != self.n:
            raise DimensionError(f"Pauli on {p.n} qubits, state on {self.n}")
        for j in _bits(p.x):
            self._hi ^= self._z[j]
        for j in _bits(p.z):
            self._hi ^= self._x[j]

    # measurement ------------------------------------------------------------

    def is_deterministic(self, q: int) -> bool:
        return (self._x[q] >> self.n) == 0

    def measure(self, q: int, rng: Optional[np.random.Generator] = None, forced: Optional[int] = None) -> int:
        """Measure qubit ``q`` in the Z basis in place.

        ``forced`` selects the branch of a random outcome (used for exact
        enumeration); forcing a zero-probability outcome raises ValueError.
        """
        if not 0 <= q < self.n:
            raise IndexError(f"qubit {q} out of range for n={self.n}")
        n = self.n
        anticommuting = self._x[q] >> n
        if anticommuting:
            p = n + (anticommuting & -anticommuting).bit_length() - 1
            old = self.row(p)
            mask = self._x[q] & ~(1 << p)
            parity = 0
            for j in _bits(old.x):
                parity ^= self._z[j]
            self._add_phase(mask, old.phase)
            self._hi ^= parity & mask
            for j in _bits(old.x):
                self._x[j] ^= mask
            for j in _bits(old.z):
                self._z[j] ^= mask
            if forced is None:
                if rng is None:
                    raise ValueError("random measurement outcome needs an rng")
                forced = int(rng.integers(2))
            self._set_row(p - n, old)
            self._set_row(p, PauliString(n, 0, 1 << q, 2 * forced))
            return forced

        acc = PauliString.identity(n)
        for i in _bits(self._x[q] & ((1 << n) - 1)):
            acc = pauli_multiply(acc, self.row(n + i))
        outcome = acc.phase // 2
        if forced is not None and forced != outcome:
            raise ValueError(f"outcome {forced} on qubit {q} has probability zero")
        return outcome

    def measure_all(self, rng: np.random.Generator) -> str:
        return "".join(str(self.measure(q, rng)) for q in range(self.n))

    def outcome_distribution(self) -> Dict[str, Fraction]:
        """Exact distribution of measuring every qubit, keyed by bitstring."""
        out: Dict[str, Fraction] = {}
        stack = [(self.copy(), "", Fraction(1))]
        while stack:
            state, prefix, prob = stack.pop()
            q = len(prefix)
            if q == self.n:
                out[prefix] = prob
                continue
            if state.is_deterministic(q):
                bit = state.measure(q)
                stack.append((state, prefix + str(bit), prob))
                continue
            for bit in (0, 1):
                child = state.copy()
                child.measure(q, forced=bit)
                stack.append((child, prefix + str(bit), prob / 2))
        return out

    def stabilizer_sign(self, p: PauliString) -> Optional[int]:
        """+1 or -1 if ``+p`` or ``-p`` stabilizes the state, else None."""
        if p.n != self.n or not p.is_hermitian():
            return None
        acc = PauliString.identity(self.n)
        for i, d in enumerate(self.destabilizers):
            anticommutes = ((d.x & p.z).bit_count() + (d.z & p.x).bit_count()) % 2
            if anticommutes:
                acc = pauli_multiply(acc, self.row(self.n + i))
        if (acc.x, acc.z) != (p.x, p.z):
            return None
        for s in self.stabilizers:
            if ((s.x & p.z).bit_count() + (s.z & p.x).bit_count()) % 2:
                return None
        return 1 if (acc.phase - p.phase) % 4 == 0 else -1

    # comparison and conversion ---------------------------------------------

    def canonical(self) -> Tuple[PauliString, ...]:
        """Stabilizer generators in reduced row-echelon form (unique per state)."""
        rows = list(self.stabilizers)
        n = self.n
        pivot = 0
        columns = [("x", j) for j in range(n)] + [("z", j) for j in range(n)]
        for kind, j in columns:
            hit = next(
                (r for r in range(pivot, n) if ((rows[r].x if kind == "x" else rows[r].z) >> j) & 1),
                None,
            )
            if hit is None:
                continue
            rows[pivot], rows[hit] = rows[hit], rows[pivot]
            for r in range(n):
                if r != pivot and ((rows[r].x if kind == "x" else rows[r].z) >> j) & 1:
                    rows[r] = pauli_multiply(rows[r], rows[pivot])
            pivot += 1
            if pivot == n:
                break
        return tuple(rows)

    def same_state(self, other: "StabilizerState") -> bool:
        return self.n == other.n and self.canonical() == other.canonical()

    def to_dense(self) -> DenseState:
        """Dense amplitudes, fixed up to global phase by a real positive entry."""
        check_cap(self.n)
        trial = self.copy()
        bits = "".join(
            str(trial.measure(q, forced=None if trial.is_deterministic(q) else 0)) for q in range(self.n)
        )
        vec = np.zeros(2**self.n, dtype=complex)
        vec[int(bits, 2) if bits else 0] = 1
        for g in self.stabilizers:
            vec = 0.5 * (vec + apply_pauli_to_vector(vec, self.n, g))
        return DenseState.from_vector(vec)

    def tensor(self, other: "StabilizerState") -> "StabilizerState":
        n = self.n + other.n

        def lift(p: PauliString, offset: int) -> PauliString:
            return PauliString(n, p.x << offset, p.z << offset, p.phase)

        destab = [lift(p, 0) for p in self.destabilizers] + [lift(p, self.n) for p in other.destabilizers]
        stab = [lift(p, 0) for p in self.stabilizers] + [lift(p, self.n) for p in other.stabilizers]
        return StabilizerState.from_rows(destab, stab)

    def permuted(self, perm: Sequence[int]) -> "StabilizerState":
        """Move qubit ``j`` to position ``perm[j]``."""
        if sorted(perm) != list(range(self.n)):
            raise DimensionError(f"not a permutation of {self.n} qubits: {list(perm)}")
        out = self.copy()
        for j, dest in enumerate(perm):
            out._x[dest] = self._x[j]
            out._z[dest] = self._z[j]
        return out

    def __repr__(self) -> str:
        return f"StabilizerState(n={self.n}, stabilizers={list(self.stabilizers)})"


def apply_circuit(s: StabilizerState, c: CliffordCircuit) -> StabilizerState:
    out = s.copy()
    out.apply(c)
    return out


def measure_z(s: StabilizerState, qubit: int, rng: np.random.Generator) -> Tuple[int, StabilizerState]:
    out = s.copy()
    bit = out.measure(qubit, rng)
    return bit, out
