"""Prover and verifier state machines.

Each party owns one transport endpoint and its own RNG. The encoded witness
travels out of band as a PhysicalRegister: the verifier can measure it but
never sees the key.
"""
import logging
import re
from abc import ABC
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from config.config import Config
from encoding.encoder import EncodedWitness, encode_honest
from encoding.key import EncodingKey, sample_key
from lch.model import LchInstance, LchTerm
from protocol.coin_flip import (
    challenge_length,
    check_coin_reveal,
    random_bits,
    select_term,
    send_coin_challenge,
    send_coin_commitments,
    send_coin_reveal,
)
from protocol.commitment import Commitment, commit
from protocol.messages import (
    ABORT,
    COINFLIP_CHALLENGE,
    NPZK,
    OUTCOME_U,
    PROVER,
    VERDICT,
    VERIFIER,
    WITNESS_COMMITMENT,
    Message,
    ProtocolError,
)
from protocol.npzk import NpzkFunctionality, NpzkStatement, npzk_prove, npzk_verify
from protocol.predicates import eval_Q
from protocol.transport import Transport
from qsim.dense import DenseState
from qsim.pauli import DimensionError
from sampler.challenge import challenge_outcome
from steane.code import xor_bits

logger = logging.getLogger(__name__)


class PhysicalRegister:
    """The encoded witness as handed to the verifier."""

    def __init__(self, enc: EncodedWitness):
        self._enc = enc

    @property
    def n(self) -> int:
        return self._enc.key.n

    @property
    def N(self) -> int:
        return self._enc.key.N

    def measure(self, term: LchTerm, rng: np.random.Generator) -> str:
        """Apply the term's Clifford transversally to its support blocks and measure them."""
        return challenge_outcome(self._enc, term, self._enc.key, rng).u


_XOR_WEIGHT = re.compile(r"^xor:w(\d+)$")
_XOR_POSITIONS = re.compile(r"^xor:p(\d+(?:,\d+)*)$")
_WRONG_TERM = re.compile(r"^wrong-term:(\d+)$")


@dataclass(frozen=True)
class AdversaryConfig:
    """Verifier behaviour: honest, XOR mask on the reported string, or measuring the wrong term."""

    kind: str = "honest"
    weight: int = 0
    positions: Tuple[int, ...] = ()
    term: int = 0

    @classmethod
    def parse(cls, spec: str) -> "AdversaryConfig":
        spec = spec.strip()
        if spec == "honest":
            return cls()
        if m := _XOR_WEIGHT.match(spec):
            return cls("xor", weight=int(m.group(1)))
        if m := _XOR_POSITIONS.match(spec):
            return cls("xor", positions=tuple(int(p) for p in m.group(1).split(",")))
        if m := _WRONG_TERM.match(spec):
            if int(m.group(1)) < 1:
                raise ValueError("wrong-term index is 1-based")
            return cls("wrong-term", term=int(m.group(1)))
        raise ValueError(f"unknown adversary {spec!r} (honest | xor:w<weight> | xor:p<i,j,...> | wrong-term:<j>)")

    @property
    def spec(self) -> str:
        if self.kind == "xor":
            return f"xor:w{self.weight}" if not self.positions else "xor:p" + ",".join(map(str, self.positions))
        if self.kind == "wrong-term":
            return f"wrong-term:{self.term}"
        return "honest"

    @property
    def is_honest(self) -> bool:
        return self.kind == "honest"

    def mask(self, length: int, rng: np.random.Generator) -> str:
        """XOR mask over the reported string; all zeros unless this is an XOR adversary."""
        if self.kind != "xor":
            return "0" * length
        if self.positions:
            if max(self.positions) >= length:
                raise DimensionError(f"mask position {max(self.positions)} outside a {length}-bit outcome")
            hits = set(self.positions)
        else:
            if self.weight > length:
                raise DimensionError(f"mask weight {self.weight} exceeds {length} bits")
            hits = {int(p) for p in rng.choice(length, size=self.weight, replace=False)}
        return "".join("1" if i in hits else "0" for i in range(length))


class PartyMachine(ABC):
    role: str = ""

    def __init__(
        self,
        endpoint: Transport,
        inst: LchInstance,
        rng: np.random.Generator,
        npzk: Optional[NpzkFunctionality] = None,
    ):
        if endpoint.role != self.role:
            raise ProtocolError(f"{type(self).__name__} needs a {self.role} endpoint, got {endpoint.role}")
        self.endpoint = endpoint
        self.inst = inst
        self.rng = rng
        # both parties of a session must share one functionality
        self.npzk = npzk or NpzkFunctionality()
        self.r: Optional[str] = None

    @property
    def challenge_bits(self) -> int:
        return challenge_length(self.inst.m)

    @property
    def term(self) -> LchTerm:
        if self.r is None:
            raise ProtocolError("no challenge selected yet")
        return self.inst.term(select_term(self.r, self.inst.m))

    def _send(self, kind: str, payload: dict) -> None:
        self.endpoint.send(Message(self.role, kind, payload))

    def _recv(self, *kinds: str) -> Message:
        return self.endpoint.recv(kinds)


class ProverMachine(PartyMachine):
    """Honest prover. Without a witness it sends a uniformly random basis state."""

    role = PROVER

    def __init__(
        self,
        endpoint: Transport,
        inst: LchInstance,
        witness: Optional[DenseState],
        rng: np.random.Generator,
        t_level: Optional[int] = None,
        backend: Optional[str] = None,
        npzk: Optional[NpzkFunctionality] = None,
    ):
        super().__init__(endpoint, inst, rng, npzk)
        if witness is not None and witness.k != inst.n:
            raise DimensionError(f"witness on {witness.k} qubits, instance on {inst.n}")
        self.witness = witness
        self.t_level = Config.PROTOCOL.t_level if t_level is None else t_level
        self.backend = backend
        self.key: Optional[EncodingKey] = None
        self.commitment: Optional[Commitment] = None
        self._coins: Optional[Tuple[str, List[bytes]]] = None

    def logical_state(self) -> DenseState:
        return self.witness if self.witness is not None else DenseState.from_bits(random_bits(self.inst.n, self.rng))

    def make_key(self) -> EncodingKey:
        return sample_key(self.inst.n, 7**self.t_level, self.rng)

    def commit_key(self, key: EncodingKey) -> Commitment:
        return commit(key.commitment_message(), key.salt, self.backend)

    def send_witness(self) -> PhysicalRegister:
        """Encode, commit to (perm, a, b) and announce; returns the register for the verifier."""
        self.key = self.make_key()
        enc = encode_honest(self.logical_state(), self.key)
        self.commitment = self.commit_key(self.key)
        self._send(
            WITNESS_COMMITMENT,
            {"n": self.inst.n, "N": self.key.N, "commitment": self.commitment.to_json()},
        )
        return PhysicalRegister(enc)

    def coin_bits(self) -> str:
        return random_bits(self.challenge_bits, self.rng)

    def coin_commit(self) -> None:
        y = self.coin_bits()
        self._coins = (y, send_coin_commitments(self.endpoint, y, self.rng, self.backend))

    def coin_reveal(self) -> None:
        self.r = send_coin_reveal(self.endpoint, *self._coins)

    def receive_challenge(self) -> None:
        self.r = self._recv(COINFLIP_CHALLENGE).payload["r"]

    def respond(self) -> bool:
        """Check Q on the reported outcome; abort on 0, otherwise run the NP-ZK proof."""
        u = self._recv(OUTCOME_U).payload["u"]
        term = self.term
        try:
            passed = eval_Q(term, self.key, u)
        except DimensionError as e:
            logger.warning(f"Malformed outcome string: {e}")
            passed = False
        if not passed:
            logger.warning(f"Prover aborts on challenge r={self.r!r}")
            self._send(ABORT, {"reason": "predicate"})
            return False
        statement = NpzkStatement(self.commitment, self.r, u, term)
        self._send(NPZK, {"proof": npzk_prove(statement, self.key, self.npzk)})
        return True


class VerifierMachine(PartyMachine):
    role = VERIFIER

    def __init__(
        self,
        endpoint: Transport,
        inst: LchInstance,
        rng: np.random.Generator,
        adversary: Optional[AdversaryConfig] = None,
        npzk: Optional[NpzkFunctionality] = None,
    ):
        super().__init__(endpoint, inst, rng, npzk)
        self.adversary = adversary or AdversaryConfig()
        if self.adversary.kind == "wrong-term" and self.adversary.term > inst.m:
            raise ValueError(f"wrong-term index {self.adversary.term} outside 1..{inst.m}")
        self.register: Optional[PhysicalRegister] = None
        self.commitment: Optional[Commitment] = None
        self._coin_commitments: List[Commitment] = []
        self._z = ""
        self.u: Optional[str] = None

    def receive_witness(self, register: PhysicalRegister) -> None:
        payload = self._recv(WITNESS_COMMITMENT).payload
        if payload["n"] != self.inst.n or register.n != self.inst.n:
            raise ProtocolError(f"register for {payload['n']} qubits, instance has {self.inst.n}")
        self.commitment = Commitment.from_json(payload["commitment"])
        self.register = register

    def coin_challenge(self) -> None:
        self._coin_commitments, self._z = send_coin_challenge(self.endpoint, self.challenge_bits, self.rng)

    def coin_check(self) -> str:
        self.r = check_coin_reveal(self.endpoint, self._coin_commitments, self._z)
        return self.r

    def choose_challenge(self) -> str:
        """Coin-flip bypass: the verifier picks r itself."""
        self.r = random_bits(self.challenge_bits, self.rng)
        self._send(COINFLIP_CHALLENGE, {"r": self.r})
        return self.r

    def measured_term(self) -> LchTerm:
        if self.adversary.kind == "wrong-term":
            return self.inst.term(self.adversary.term)
        return self.term

    def challenge(self) -> str:
        """Measure the register and report u, XOR-masked if adversarial."""
        u = self.register.measure(self.measured_term(), self.rng)
        self.u = xor_bits(u, self.adversary.mask(len(u), self.rng))
        self._send(OUTCOME_U, {"r": self.r, "u": self.u})
        return self.u

    def decide(self) -> str:
        msg = self._recv(NPZK, ABORT)
        if msg.kind == ABORT:
            return self.reject("prover-abort")
        statement = NpzkStatement(self.commitment, self.r, self.u, self.term)
        if not npzk_verify(statement, msg.payload.get("proof", {}), self.npzk):
            return self.reject("npzk")
        self._send(VERDICT, {"verdict": "accept"})
        return "accept"

    def reject(self, reason: str) -> str:
        self._send(VERDICT, {"verdict": "reject", "reason": reason})
        return "reject"


