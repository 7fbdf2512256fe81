"""Wire messages, the ordering grammar both parties enforce, and transcripts."""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

from typing_extensions import Literal, Self

logger = logging.getLogger(__name__)

PROVER = "prover"
VERIFIER = "verifier"

WITNESS_COMMITMENT = "witness+commitment"
COINFLIP_COMMIT = "coinflip-commit"
COINFLIP_CHALLENGE = "coinflip-challenge"
COINFLIP_REVEAL = "coinflip-reveal"
OUTCOME_U = "outcome-u"
NPZK = "npzk"
ABORT = "abort"
VERDICT = "verdict"

KINDS = (WITNESS_COMMITMENT, COINFLIP_COMMIT, COINFLIP_CHALLENGE, COINFLIP_REVEAL, OUTCOME_U, NPZK, ABORT, VERDICT)
VERDICTS = ("accept", "reject", "abort")

Role = Literal["prover", "verifier"]
Verdict = Literal["accept", "reject", "abort"]

# state -> {(role, kind): next state}
_GRAMMAR: Dict[str, Dict[tuple, str]] = {
    "start": {(PROVER, WITNESS_COMMITMENT): "committed"},
    "committed": {(PROVER, COINFLIP_COMMIT): "coins-committed", (VERIFIER, COINFLIP_CHALLENGE): "challenged"},
    "coins-committed": {(VERIFIER, COINFLIP_CHALLENGE): "coins-challenged"},
    "coins-challenged": {(PROVER, COINFLIP_REVEAL): "challenged"},
    "challenged": {(VERIFIER, OUTCOME_U): "measured"},
    "measured": {(PROVER, NPZK): "proved", (PROVER, ABORT): "aborted"},
    "proved": {},
    "aborted": {},
    "done": {},
}


class ProtocolError(RuntimeError):
    """Out-of-order or malformed message."""


@dataclass(frozen=True)
class Message:
    role: Role
    kind: str
    payload: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.role not in (PROVER, VERIFIER):
            raise ProtocolError(f"unknown role {self.role!r}")
        if self.kind not in KINDS:
            raise ProtocolError(f"unknown message kind {self.kind!r}")

    def to_json_line(self) -> str:
        return json.dumps({"role": self.role, "kind": self.kind, "payload": self.payload}, sort_keys=True)

    @classmethod
    def from_json_line(cls, line: str) -> Self:
        try:
            data = json.loads(line)
            return cls(data["role"], data["kind"], dict(data.get("payload", {})))
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise ProtocolError(f"malformed transcript line: {e}") from e


class OrderValidator:
    """Tracks the protocol phase and rejects messages that break the order."""

    def __init__(self, start: str = "start"):
        if start not in _GRAMMAR:
            raise ValueError(f"unknown protocol state {start!r}")
        self.state = start

    @property
    def finished(self) -> bool:
        return self.state == "done"

    def feed(self, msg: Message) -> None:
        if self.state == "done":
            raise ProtocolError(f"{msg.kind} after the verdict")
        if msg.kind == VERDICT:
            self._check_verdict(msg)
            self.state = "done"
            return
        nxt = _GRAMMAR[self.state].get((msg.role, msg.kind))
        if nxt is None:
            raise ProtocolError(f"{msg.role} sent {msg.kind} in state {self.state}")
        self.state = nxt

    def _check_verdict(self, msg: Message) -> None:
        if msg.role != VERIFIER:
            raise ProtocolError("only the verifier issues a verdict")
        verdict = msg.payload.get("verdict")
        if verdict not in VERDICTS:
            raise ProtocolError(f"unknown verdict {verdict!r}")
        # a prover abort can only end in rejection
        if verdict == "accept" and self.state != "proved":
            raise ProtocolError(f"accept verdict in state {self.state}")


@dataclass
class Transcript:
    messages: List[Message] = field(default_factory=list)

    def append(self, msg: Message) -> None:
        self.messages.append(msg)

    @property
    def verdict(self) -> Optional[Verdict]:
        verdicts = [m for m in self.messages if m.kind == VERDICT]
        return verdicts[-1].payload["verdict"] if verdicts else None

    @property
    def accepted(self) -> bool:
        return self.verdict == "accept"

    def find(self, kind: str) -> Optional[Message]:
        return next((m for m in self.messages if m.kind == kind), None)

    def to_jsonl(self) -> str:
        return "".join(m.to_json_line() + "\n" for m in self.messages)

    @classmethod
    def from_jsonl(cls, text: str) -> Self:
        return cls([Message.from_json_line(line) for line in text.splitlines() if line.strip()])

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_jsonl())

    @classmethod
    def load(cls, path: Union[str, Path]) -> Self:
        return cls.from_jsonl(Path(path).read_text())


def validate_order(messages: Iterable[Message]) -> bool:
    """True when the messages form one complete, correctly ordered execution."""
    validator = OrderValidator()
    try:
        for msg in messages:
            validator.feed(msg)
    except ProtocolError as e:
        logger.debug(f"Transcript rejected: {e}")
        return False
    return validator.finished
