"""Pauli strings in the symplectic (x, z, phase) representation.

A PauliString stands for ``i^phase * X^{x_0} Z^{z_0} (x) ... (x) X^{x_{n-1}} Z^{z_{n-1}}``.
Bit ``j`` of the integers ``x`` and ``z`` belongs to qubit ``j``; qubit 0 is the
leftmost tensor factor. Y is therefore ``(x=1, z=1, phase=1)`` since Y = iXZ.
"""
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

_PAULI_2x2 = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
    (1, 1): np.array([[0, -1], [1, 0]], dtype=complex),  # XZ
}


class DimensionError(ValueError):
    """Raised when qubit counts or string lengths disagree."""


def _check_same_size(n: int, m: int) -> None:
    if n != m:
        raise DimensionError(f"qubit count mismatch: {n} != {m}")


@dataclass(frozen=True)
class PauliString:
    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        limit = 1 << self.n
        if self.n < 0 or not (0 <= self.x < limit and 0 <= self.z < limit):
            raise DimensionError(f"x/z bits do not fit in {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, label: str) -> "PauliString":
        """One-qubit Pauli ``label`` (I, X, Y or Z) on ``qubit`` of an n-qubit register."""
        if not 0 <= qubit < n:
            raise DimensionError(f"qubit {qubit} out of range for n={n}")
        return cls.from_label("I" * qubit + label + "I" * (n - qubit - 1))

    @classmethod
    def from_label(cls, label: str, phase: int = 0) -> "PauliString":
        x = z = 0
        for j, ch in enumerate(label.upper()):
            if ch in "XY":
                x |= 1 << j
            if ch in "ZY":
                z |= 1 << j
            if ch == "Y":
                phase += 1
            elif ch not in "IXZ":
                raise ValueError(f"unknown Pauli letter {ch!r}")
        return cls(len(label), x, z, phase)

    @property
    def x_bits(self) -> Tuple[int, ...]:
        return tuple((self.x >> j) & 1 for j in range(self.n))

    @property
    def z_bits(self) -> Tuple[int, ...]:
        return tuple((self.z >> j) & 1 for j in range(self.n))

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def is_hermitian(self) -> bool:
        return self.phase % 2 == (self.x & self.z).bit_count() % 2

    def letter(self, qubit: int) -> str:
        return "IXZY"[((self.x >> qubit) & 1) | (((self.z >> qubit) & 1) << 1)]

    def label(self) -> str:
        """Letters per qubit, ignoring the overall phase."""
        return "".join(self.letter(j) for j in range(self.n))

    def hermitian_phase(self) -> int:
        """Power k with self == i^k * (product of the Hermitian letters in ``label()``)."""
        return (self.phase - (self.x & self.z).bit_count()) % 4

    def to_json(self) -> Dict[str, object]:
        return {
            "x": "".join(str(b) for b in self.x_bits),
            "z": "".join(str(b) for b in self.z_bits),
            "phase": self.phase,
        }

    @classmethod
    def from_json(cls, data: Dict[str, object]) -> "PauliString":
        xs, zs = str(data["x"]), str(data["z"])
        _check_same_size(len(xs), len(zs))
        x = sum(1 << j for j, ch in enumerate(xs) if ch == "1")
        z = sum(1 << j for j, ch in enumerate(zs) if ch == "1")
        return cls(len(xs), x, z, int(data.get("phase", 0)))

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_multiply(self, other)

    def __repr__(self) -> str:
        sign = ("+", "+i", "-", "-i")[self.hermitian_phase()]
        return f"PauliString('{sign}{self.label()}')"


def pauli_multiply(p: PauliString, q: PauliString) -> PauliString:
    """Group product ``p * q`` with exact phase.

    Z^a X^b = (-1)^{a.b} X^b Z^a, so moving q's X factors past p's Z factors
    contributes (-1)^{|z_p & x_q|}.
    """
    _check_same_size(p.n, q.n)
    phase = p.phase + q.phase + 2 * (p.z & q.x).bit_count()
    return PauliString(p.n, p.x ^ q.x, p.z ^ q.z, phase)


def commutes(p: PauliString, q: PauliString) -> bool:
    _check_same_size(p.n, q.n)
    return ((p.x & q.z).bit_count() + (p.z & q.x).bit_count()) % 2 == 0


def pauli_matrix(p: PauliString) -> np.ndarray:
    """Dense 2^n x 2^n matrix of ``p`` (oracle use only)."""
    out = np.array([[1.0 + 0j]])
    for j in range(p.n):
        out = np.kron(out, _PAULI_2x2[((p.x >> j) & 1, (p.z >> j) & 1)])
    return (1j ** p.phase) * out
