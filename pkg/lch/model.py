"""Data model for verification circuits and Clifford-Hamiltonian instances."""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np

from config.config import Config
from qsim.circuit import CliffordCircuit
from qsim.dense import DenseState, check_cap, dense_apply

logger = logging.getLogger(__name__)

# tag -> dense gate name; both act on two distinct qubits
VERIFICATION_GATES = {"CP": "CP", "HH": "HH"}


class InstanceError(ValueError):
    """Raised for malformed circuits or instances."""


@dataclass(frozen=True)
class VerificationCircuit:
    """Circuit over {controlled-P, H(x)H} acting on witness qubits then ancillas.

    Witness qubits are 0..n_witness-1, ancillas follow and start in |0>.
    Acceptance is measuring ``output`` as 1.
    """

    n_witness: int
    n_ancilla: int
    gates: Tuple[Tuple[str, int, int], ...]
    output: int = 0

    def __post_init__(self):
        normalized = []
        for gate in self.gates:
            if len(gate) != 3:
                raise InstanceError(f"gate {gate!r} must be [tag, qubit, qubit]")
            tag = str(gate[0]).upper()
            if tag not in VERIFICATION_GATES:
                raise InstanceError(f"unsupported verification gate {gate[0]!r} (expected CP or HH)")
            a, b = int(gate[1]), int(gate[2])
            if a == b or not (0 <= a < self.n_total and 0 <= b < self.n_total):
                raise InstanceError(f"gate {tag}({a},{b}) invalid on {self.n_total} qubits")
            normalized.append((tag, a, b))
        object.__setattr__(self, "gates", tuple(normalized))
        if self.n_witness < 0 or self.n_ancilla < 0 or self.n_total == 0:
            raise InstanceError("circuit needs at least one qubit")
        if not 0 <= self.output < self.n_total:
            raise InstanceError(f"output qubit {self.output} out of range")

    @property
    def n_total(self) -> int:
        return self.n_witness + self.n_ancilla

    @property
    def T(self) -> int:
        return len(self.gates)

    def initial_state(self, witness: DenseState) -> DenseState:
        if witness.k != self.n_witness:
            raise InstanceError(f"witness has {witness.k} qubits, circuit expects {self.n_witness}")
        check_cap(self.n_total)
        return witness.tensor(DenseState.zero(self.n_ancilla)) if self.n_ancilla else witness

    def run(self, witness: DenseState, steps: int = None) -> DenseState:
        """State after the first ``steps`` gates (all gates by default)."""
        state = self.initial_state(witness)
        gates = self.gates if steps is None else self.gates[:steps]
        return dense_apply(state, [(VERIFICATION_GATES[g[0]], g[1], g[2]) for g in gates])

    def acceptance_probability(self, witness: DenseState) -> float:
        final = self.run(witness)
        probs = final.probabilities().reshape([2] * self.n_total)
        return float(np.take(probs, 1, axis=self.output).sum())

    def to_json(self) -> Dict[str, Any]:
        return {
            "witness": self.n_witness,
            "ancilla": self.n_ancilla,
            "output": self.output,
            "gates": [list(g) for g in self.gates],
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "VerificationCircuit":
        try:
            return cls(
                n_witness=int(data["witness"]),
                n_ancilla=int(data.get("ancilla", 0)),
                gates=tuple(tuple(g) for g in data.get("gates", [])),
                output=int(data.get("output", 0)),
            )
        except (KeyError, TypeError) as e:
            raise InstanceError(f"malformed circuit description: {e}") from e


@dataclass(frozen=True)
class LchTerm:
    """The projection C^dagger |0^k><0^k| C on ``support``."""

    clifford: CliffordCircuit
    support: Tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(int(q) for q in self.support))
        if len(set(self.support)) != len(self.support):
            raise InstanceError(f"support {self.support} repeats a qubit")
        if self.clifford.n != len(self.support):
            raise InstanceError(f"clifford on {self.clifford.n} qubits, support of size {len(self.support)}")

    @property
    def k(self) -> int:
        return len(self.support)

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"support": list(self.support), "clifford": self.clifford.to_json()}
        if self.label:
            data["label"] = self.label
        return data

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "LchTerm":
        return cls(CliffordCircuit.from_json(data["clifford"]), tuple(data["support"]), data.get("label", ""))


@dataclass(frozen=True)
class LchInstance:
    n: int
    terms: Tuple[LchTerm, ...]
    p: int
    q: int
    k: int = Config.PROTOCOL.locality
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.p <= 0 or self.q <= 0:
            raise InstanceError("p and q must be positive")
        if 2**self.p <= self.q:
            raise InstanceError(f"instance requires 2^p > q (p={self.p}, q={self.q})")
        for j, term in enumerate(self.terms):
            if term.k > self.k:
                raise InstanceError(f"term {j} acts on {term.k} qubits, locality is {self.k}")
            if any(not 0 <= s < self.n for s in term.support):
                raise InstanceError(f"term {j} support {term.support} outside {self.n} qubits")

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def alpha(self) -> float:
        return 2.0 ** -self.p

    @property
    def beta(self) -> float:
        return 1.0 / self.q

    def term(self, j: int) -> LchTerm:
        """Term by 1-based index."""
        if not 1 <= j <= self.m:
            raise InstanceError(f"term index {j} outside 1..{self.m}")
        return self.terms[j - 1]

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "k": self.k,
            "p": self.p,
            "q": self.q,
            "terms": [t.to_json() for t in self.terms],
            "metadata": self.metadata,
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "LchInstance":
        try:
            return cls(
                n=int(data["n"]),
                terms=tuple(LchTerm.from_json(t) for t in data["terms"]),
                p=int(data["p"]),
                q=int(data["q"]),
                k=int(data.get("k", Config.PROTOCOL.locality)),
                metadata=dict(data.get("metadata", {})),
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, InstanceError):
                raise
            raise InstanceError(f"malformed instance: {e}") from e


def load_json(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a JSON file, turning decode errors into InstanceError with line info."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e


def load_circuit(path: Union[str, Path]) -> VerificationCircuit:
    return VerificationCircuit.from_json(load_json(path))


def load_instance(path: Union[str, Path]) -> LchInstance:
    return LchInstance.from_json(load_json(path))


def save_instance(inst: LchInstance, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(inst.to_json(), indent=2, sort_keys=True) + "\n")
    logger.info(f"Wrote instance with {inst.m} terms on {inst.n} qubits to {path}")
