"""Zero-knowledge subprotocol for the NP statement about (z, r, u).

The statement: some salt and key (t, pi, a, b) open the commitment z to
(pi, a, b), and Q_r(t, pi, u, a, b) = 1. The default backend is an ideal
functionality that evaluates both conditions and discloses only the bit.
"""
import hashlib
import json
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Optional

from encoding.key import EncodingKey
from lch.model import LchTerm
from protocol.commitment import Commitment, verify_open
from protocol.predicates import eval_Q

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NpzkStatement:
    commitment: Commitment
    r: str
    u: str
    term: LchTerm

    def digest(self) -> str:
        blob = json.dumps(
            {"z": self.commitment.to_json(), "r": self.r, "u": self.u, "term": self.term.to_json()},
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()


class NpzkBackend(ABC):
    """Evaluates the NP relation for the trusted party."""

    name: str = ""

    @abstractmethod
    def evaluate(self, statement: NpzkStatement, key: EncodingKey) -> bool:
        pass


class IdealNpzk(NpzkBackend):
    """Checks the opening and Q."""

    name = "ideal"

    def evaluate(self, statement: NpzkStatement, key: EncodingKey) -> bool:
        if not verify_open(statement.commitment, key.commitment_message(), key.salt):
            logger.debug("Key does not open the commitment")
            return False
        return eval_Q(statement.term, key, statement.u)


class SimulatedNpzk(NpzkBackend):
    """Stand-in for the subprotocol's simulator: skips the opening check.

    A simulated transcript commits to a fixed tuple that the real key does not
    open, so only Q decides the bit.
    """

    name = "simulated"

    def evaluate(self, statement: NpzkStatement, key: EncodingKey) -> bool:
        return eval_Q(statement.term, key, statement.u)


BACKENDS: Dict[str, NpzkBackend] = {b.name: b for b in (IdealNpzk(), SimulatedNpzk())}


class NpzkFunctionality:
    """Trusted party shared by the two machines of one session.

    The prover deposits its key and gets back a receipt naming the statement;
    the receipt does not name the backend, so real and simulated NPZK
    messages have the same shape. The verifier asks the functionality for
    the bit it recorded; nothing the prover sends can set it.
    """

    def __init__(self, backend: Optional[str] = None):
        name = backend or "ideal"
        if name not in BACKENDS:
            raise ValueError(f"unknown NP-ZK backend {name!r} (expected one of {sorted(BACKENDS)})")
        self.backend = BACKENDS[name]
        self._bits: Dict[str, bool] = {}

    @property
    def name(self) -> str:
        return self.backend.name

    def prove(self, statement: NpzkStatement, key: EncodingKey) -> Dict[str, Any]:
        digest = statement.digest()
        self._bits[digest] = self.backend.evaluate(statement, key)
        return {"statement": digest}

    def verify(self, statement: NpzkStatement, proof: Dict[str, Any]) -> bool:
        digest = statement.digest()
        if proof.get("statement") != digest:
            return False
        return self._bits.get(digest, False)


def npzk_prove(statement: NpzkStatement, key: EncodingKey, functionality: NpzkFunctionality) -> Dict[str, Any]:
    return functionality.prove(statement, key)


def npzk_verify(statement: NpzkStatement, proof: Dict[str, Any], functionality: NpzkFunctionality) -> bool:
    return functionality.verify(statement, proof)
