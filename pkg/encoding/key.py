"""The prover's secret encoding key (traps, shared permutation, Pauli pads)."""
import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from config.config import Config
from qsim.pauli import DimensionError, PauliString
from steane.code import SteaneCode

logger = logging.getLogger(__name__)

TRAP_SYMBOLS = "0+r"  # r stands for (|0> - i|1>)/sqrt(2)


def level_for(N: int) -> int:
    t = round(math.log(N, 7)) if N > 0 else 0
    if t < 1 or 7**t != N:
        raise ValueError(f"block length {N} is not a positive power of 7")
    return t


@dataclass(frozen=True)
class EncodingKey:
    """Secret (traps, perm, a, b) plus the commitment salt.

    Block ``i`` of the physical register holds 2N qubits. Before permutation its
    positions 0..N-1 carry the code and N..2N-1 the traps ``traps[i*N:(i+1)*N]``.
    ``perm[j]`` is where position ``j`` lands; the same permutation is used for
    every block. Pads ``a``/``b`` are indexed by physical position.
    """

    n: int
    N: int
    traps: str
    perm: Tuple[int, ...]
    a: str
    b: str
    salt: bytes = b""

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(int(p) for p in self.perm))
        level_for(self.N)
        if len(self.traps) != self.n * self.N or set(self.traps) - set(TRAP_SYMBOLS):
            raise DimensionError(f"trap string must have {self.n * self.N} symbols over {TRAP_SYMBOLS!r}")
        if sorted(self.perm) != list(range(2 * self.N)):
            raise DimensionError(f"perm is not a permutation of {2 * self.N} positions")
        for name, pad in (("a", self.a), ("b", self.b)):
            if len(pad) != 2 * self.n * self.N or set(pad) - {"0", "1"}:
                raise DimensionError(f"pad {name} must be {2 * self.n * self.N} bits")

    @classmethod
    def trivial(cls, n: int, N: int) -> "EncodingKey":
        """Identity permutation, zero pads and |0> traps."""
        return cls(n, N, "0" * (n * N), tuple(range(2 * N)), "0" * (2 * n * N), "0" * (2 * n * N))

    @property
    def code(self) -> SteaneCode:
        return SteaneCode.level(level_for(self.N))

    @property
    def block_size(self) -> int:
        return 2 * self.N

    @property
    def inverse_perm(self) -> Tuple[int, ...]:
        inv = [0] * len(self.perm)
        for j, dest in enumerate(self.perm):
            inv[dest] = j
        return tuple(inv)

    def block_traps(self, i: int) -> str:
        return self.traps[i * self.N : (i + 1) * self.N]

    def block_pads(self, i: int) -> Tuple[str, str]:
        lo, hi = i * self.block_size, (i + 1) * self.block_size
        return self.a[lo:hi], self.b[lo:hi]

    def pad_pauli(self) -> PauliString:
        x = sum(1 << j for j, ch in enumerate(self.a) if ch == "1")
        z = sum(1 << j for j, ch in enumerate(self.b) if ch == "1")
        return PauliString(len(self.a), x, z)

    def permute(self, block: str) -> str:
        """Physical order of a (code || trap) string: out[perm[j]] = block[j]."""
        out = [""] * len(block)
        for j, ch in enumerate(block):
            out[self.perm[j]] = ch
        return "".join(out)

    def unpermute(self, block: str) -> str:
        return "".join(block[self.perm[j]] for j in range(len(block)))

    def commitment_message(self) -> bytes:
        """Canonical bytes of (perm, a, b); traps are not committed."""
        return json.dumps(
            {"perm": list(self.perm), "a": self.a, "b": self.b}, sort_keys=True, separators=(",", ":")
        ).encode()

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "N": self.N,
            "traps": self.traps,
            "perm": list(self.perm),
            "a": self.a,
            "b": self.b,
            "salt": self.salt.hex(),
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "EncodingKey":
        return cls(
            int(data["n"]),
            int(data["N"]),
            str(data["traps"]),
            tuple(data["perm"]),
            str(data["a"]),
            str(data["b"]),
            bytes.fromhex(data.get("salt", "")),
        )

    def __repr__(self) -> str:
        return f"EncodingKey(n={self.n}, N={self.N}, <secret>)"


def _bits(rng: np.random.Generator, count: int) -> str:
    return "".join(str(int(b)) for b in rng.integers(2, size=count))


def sample_key(n: int, N: int, rng: np.random.Generator, salt_bytes: Optional[int] = None) -> EncodingKey:
    """Uniform traps, permutation and pads, plus a fresh salt."""
    level_for(N)
    salt_bytes = Config.salt_bytes() if salt_bytes is None else salt_bytes
    traps = "".join(TRAP_SYMBOLS[int(s)] for s in rng.integers(3, size=n * N))
    perm = tuple(int(p) for p in rng.permutation(2 * N))
    return EncodingKey(n, N, traps, perm, _bits(rng, 2 * n * N), _bits(rng, 2 * n * N), rng.bytes(salt_bytes))
