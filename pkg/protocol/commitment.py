"""Commitment schemes with a pluggable backend.

``hash`` commits to sha256(salt || message). It is only computationally
binding. ``transparent`` keeps (salt, message) in the clear and exists for
tests and for the zero-knowledge simulator, which need to inspect openings.
"""
import hashlib
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional

from config.config import Config

logger = logging.getLogger(__name__)


class CommitmentError(ValueError):
    """Malformed salt or unknown backend."""


@dataclass(frozen=True)
class Commitment:
    value: bytes
    backend: str = "hash"

    def hex(self) -> str:
        return self.value.hex()

    def to_json(self) -> Dict[str, str]:
        return {"backend": self.backend, "value": self.value.hex()}

    @classmethod
    def from_json(cls, data: Dict[str, str]) -> "Commitment":
        return cls(bytes.fromhex(data["value"]), data.get("backend", "hash"))


class CommitmentBackend(ABC):
    name: str = ""

    @abstractmethod
    def commit(self, message: bytes, salt: bytes) -> bytes:
        """Deterministic commitment value for (message, salt)."""


class HashBackend(CommitmentBackend):
    name = "hash"

    def commit(self, message: bytes, salt: bytes) -> bytes:
        return hashlib.sha256(salt + message).digest()


class TransparentBackend(CommitmentBackend):
    name = "transparent"

    def commit(self, message: bytes, salt: bytes) -> bytes:
        return len(salt).to_bytes(2, "big") + salt + message

    @staticmethod
    def opening(z: Commitment) -> tuple:
        """(message, salt) stored in a transparent commitment."""
        size = int.from_bytes(z.value[:2], "big")
        return z.value[2 + size :], z.value[2 : 2 + size]


BACKENDS: Dict[str, CommitmentBackend] = {b.name: b for b in (HashBackend(), TransparentBackend())}


def get_backend(name: Optional[str] = None) -> CommitmentBackend:
    name = Config.COMMITMENT.backend if name is None else name
    if name not in BACKENDS:
        raise CommitmentError(f"unknown commitment backend {name!r} (expected one of {sorted(BACKENDS)})")
    return BACKENDS[name]


def _check_salt(salt: bytes, salt_bytes: Optional[int]) -> None:
    expected = Config.salt_bytes() if salt_bytes is None else salt_bytes
    if not isinstance(salt, (bytes, bytearray)) or len(salt) != expected:
        raise CommitmentError(f"salt must be {expected} bytes")


def commit(message: bytes, salt: bytes, backend: Optional[str] = None, salt_bytes: Optional[int] = None) -> Commitment:
    _check_salt(salt, salt_bytes)
    impl = get_backend(backend)
    return Commitment(impl.commit(bytes(message), bytes(salt)), impl.name)


def verify_open(z: Commitment, message: bytes, salt: bytes, salt_bytes: Optional[int] = None) -> bool:
    try:
        _check_salt(salt, salt_bytes)
    except CommitmentError:
        logger.debug("Rejecting opening with malformed salt")
        return False
    return get_backend(z.backend).commit(bytes(message), bytes(salt)) == z.value
