"""The 7-qubit Steane code and its t-fold concatenation.

Codewords are 0/1 strings, block-major: for level t the string splits into
seven blocks of 7^(t-1) characters, one per outer code position.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np

from qsim.circuit import CliffordCircuit
from qsim.pauli import DimensionError

logger = logging.getLogger(__name__)

D7_0: Tuple[str, ...] = (
    "0000000", "0001111", "0110011", "0111100",
    "1010101", "1011010", "1100110", "1101001",
)
D7_1: Tuple[str, ...] = (
    "0010110", "0011001", "0100101", "0101010",
    "1000011", "1001100", "1110000", "1111111",
)

_LOOKUP: Dict[str, int] = {**{w: 0 for w in D7_0}, **{w: 1 for w in D7_1}}

# U_7: data qubit 0, ancillas 1..6
_U7_GATES = (
    ("H", 4), ("H", 5), ("H", 6),
    ("CNOT", 0, 1), ("CNOT", 0, 2),
    ("CNOT", 6, 3), ("CNOT", 6, 1), ("CNOT", 6, 0),
    ("CNOT", 5, 3), ("CNOT", 5, 2), ("CNOT", 5, 0),
    ("CNOT", 4, 3), ("CNOT", 4, 2), ("CNOT", 4, 1),
)


class NotACodewordError(ValueError):
    """Raised when a string decodes to no logical value."""


def xor_bits(a: str, b: str) -> str:
    if len(a) != len(b):
        raise DimensionError(f"cannot xor strings of length {len(a)} and {len(b)}")
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


def parity(y: str) -> int:
    return y.count("1") % 2


@dataclass(frozen=True)
class CodeParams:
    t: int

    def __post_init__(self):
        if self.t < 1:
            raise ValueError(f"concatenation level must be >= 1, got {self.t}")

    @property
    def N(self) -> int:
        return 7**self.t


@dataclass(frozen=True)
class SteaneCode:
    params: CodeParams

    @classmethod
    def level(cls, t: int) -> "SteaneCode":
        return cls(CodeParams(t))

    @property
    def t(self) -> int:
        return self.params.t

    @property
    def N(self) -> int:
        return self.params.N

    @property
    def K(self) -> int:
        return min_distance(self)

    @property
    def transversal_is_conjugate(self) -> bool:
        """Transversal P acts as P^3 on the logical qubit at odd levels."""
        return self.t % 2 == 1

    def logical_action(self, c: CliffordCircuit) -> CliffordCircuit:
        """Logical operator implemented by applying ``c`` transversally."""
        return c.conjugated() if self.transversal_is_conjugate else c

    def codewords(self, bit: int) -> Tuple[str, ...]:
        if self.t != 1:
            raise ValueError("codeword sets are only materialized at level 1")
        return D7_1 if bit else D7_0


def _decode(y: str) -> int:
    if len(y) == 7:
        if y not in _LOOKUP:
            raise NotACodewordError(f"{y} is not a Steane codeword")
        return _LOOKUP[y]
    m = len(y) // 7
    outer = "".join(str(_decode(y[i * m : (i + 1) * m])) for i in range(7))
    return _decode(outer)


def logical_decode(y: str, code: SteaneCode) -> int:
    if len(y) != code.N:
        raise DimensionError(f"expected {code.N} bits, got {len(y)}")
    return _decode(y)


def is_codeword(y: str, code: SteaneCode) -> bool:
    try:
        logical_decode(y, code)
    except NotACodewordError:
        return False
    return True


@lru_cache(maxsize=None)
def encoder_circuit(t: int) -> CliffordCircuit:
    """U_N on 7^t qubits: outer U_7 on block leaders, then U_{N/7} inside each block."""
    if t < 1:
        raise ValueError(f"concatenation level must be >= 1, got {t}")
    base = CliffordCircuit(7, _U7_GATES)
    if t == 1:
        return base
    n = 7**t
    m = 7 ** (t - 1)
    gates = list(base.embed([i * m for i in range(7)], n).gates)
    inner = encoder_circuit(t - 1)
    for i in range(7):
        gates.extend(inner.embed(list(range(i * m, (i + 1) * m)), n).gates)
    return CliffordCircuit(n, tuple(gates))


def _min_logical_weight(bit: int, t: int) -> int:
    words = D7_1 if bit else D7_0
    if t == 1:
        return min(w.count("1") for w in words if w.count("1"))
    inner = {0: 0, 1: _min_logical_weight(1, t - 1)}
    return min(sum(inner[int(ch)] for ch in w) for w in words if "1" in w)


def min_distance(code: SteaneCode) -> int:
    """Minimum weight of D_N^1, the smallest mask that flips a logical value.

    At level 1 this is the minimum nonzero weight of D_7 (checked by scanning
    all 15 nonzero words). From level 2 on, D_N^0 contains weight-4 words, so
    the returned value is the logical-flip weight 3^t rather than the minimum
    weight of the whole code.
    """
    if code.t == 1:
        nonzero = [w for w in D7_0 + D7_1 if "1" in w]
        return min(w.count("1") for w in nonzero)
    return _min_logical_weight(1, code.t)


def sample_codeword(code: SteaneCode, bit: int, rng: np.random.Generator) -> str:
    """Uniform element of D_N^bit."""
    return _sample(code.t, bit, rng)


def _sample(t: int, bit: int, rng: np.random.Generator) -> str:
    words = D7_1 if bit else D7_0
    outer = words[int(rng.integers(8))]
    if t == 1:
        return outer
    return "".join(_sample(t - 1, int(ch), rng) for ch in outer)


def dual_coset_shift(word: str = "1111111") -> List[str]:
    """D_7^0 shifted by a fixed element of D_7^1; equals D_7^1 as a set."""
    if word not in D7_1:
        raise NotACodewordError(f"{word} is not in D_7^1")
    return sorted(xor_bits(word, w) for w in D7_0)


def transversal(c: CliffordCircuit, width: int) -> CliffordCircuit:
    """Apply each gate of ``c`` to all ``width`` positions of its qubits' blocks.

    Logical qubit ``i`` owns physical qubits ``i*width .. (i+1)*width - 1``.
    """
    gates = []
    for gate in c.gates:
        for j in range(width):
            gates.append((gate[0], *(q * width + j for q in gate[1:])))
    return CliffordCircuit(c.n * width, tuple(gates))
