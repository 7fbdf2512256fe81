"""Parallel Blum coin flipping and the challenge-string-to-term map."""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from config.config import Config
from protocol.commitment import Commitment, commit, verify_open
from protocol.messages import (
    COINFLIP_CHALLENGE,
    COINFLIP_COMMIT,
    COINFLIP_REVEAL,
    PROVER,
    VERIFIER,
    Message,
    ProtocolError,
)
from protocol.transport import Transport, duplex

logger = logging.getLogger(__name__)


def challenge_length(m: int) -> int:
    """ceil(log2 m) bits suffice to name every one of m terms."""
    if m < 1:
        raise ValueError("an instance needs at least one term")
    return math.ceil(math.log2(m)) if m > 1 else 0


def select_term(r: str, m: int) -> int:
    """1-based term index (int(r) mod m) + 1."""
    if len(r) != challenge_length(m):
        raise ValueError(f"challenge string of length {len(r)}, expected {challenge_length(m)}")
    return (int(r, 2) if r else 0) % m + 1


def random_bits(length: int, rng: np.random.Generator) -> str:
    return "".join(str(int(b)) for b in rng.integers(2, size=length))


def commit_coins(
    y: str, rng: np.random.Generator, backend: Optional[str] = None
) -> Tuple[List[bytes], List[Commitment]]:
    """Blum commitments to the bits of y, one salt per bit."""
    salts = [rng.bytes(Config.salt_bytes()) for _ in y]
    return salts, [commit(bit.encode(), s, backend) for bit, s in zip(y, salts)]


def check_reveal(commitments: List[Commitment], y: str, salts: List[bytes]) -> bool:
    if len(y) != len(commitments) or len(salts) != len(commitments):
        return False
    return all(verify_open(z, bit.encode(), s) for z, bit, s in zip(commitments, y, salts))


def combine(y: str, z: str) -> str:
    return "".join(str(int(a) ^ int(b)) for a, b in zip(y, z))


def send_coin_commitments(
    prover: Transport, y: str, rng: np.random.Generator, backend: Optional[str] = None
) -> List[bytes]:
    """Prover, round 1: commit to every bit of y; returns the salts for the reveal."""
    salts, commitments = commit_coins(y, rng, backend)
    prover.send(Message(PROVER, COINFLIP_COMMIT, {"commitments": [c.to_json() for c in commitments]}))
    return salts


def send_coin_challenge(verifier: Transport, length: int, rng: np.random.Generator) -> Tuple[List[Commitment], str]:
    """Verifier, round 2: receive the commitments and answer with fresh bits z."""
    received = [Commitment.from_json(c) for c in verifier.recv((COINFLIP_COMMIT,)).payload["commitments"]]
    if len(received) != length:
        raise ProtocolError(f"{len(received)} coin commitments, expected {length}")
    z = random_bits(length, rng)
    verifier.send(Message(VERIFIER, COINFLIP_CHALLENGE, {"z": z}))
    return received, z


def send_coin_reveal(prover: Transport, y: str, salts: List[bytes]) -> str:
    """Prover, round 3: open y and return r = y xor z."""
    z = prover.recv((COINFLIP_CHALLENGE,)).payload["z"]
    prover.send(Message(PROVER, COINFLIP_REVEAL, {"y": y, "salts": [s.hex() for s in salts]}))
    return combine(y, z)


def check_coin_reveal(verifier: Transport, commitments: List[Commitment], z: str) -> str:
    """Verifier: check the opening against round 1 and return r."""
    reveal = verifier.recv((COINFLIP_REVEAL,)).payload
    if not check_reveal(commitments, reveal["y"], [bytes.fromhex(s) for s in reveal["salts"]]):
        raise ProtocolError("coin-flip opening does not match the commitment")
    return combine(reveal["y"], z)


def coin_flip(
    length: int,
    prover_rng: np.random.Generator,
    verifier_rng: np.random.Generator,
    transport: Optional[Tuple[Transport, Transport]] = None,
    backend: Optional[str] = None,
) -> str:
    """Run ``length`` Blum rounds in parallel; r_i = y_i xor z_i.

    Raises ProtocolError when the prover's opening does not match.
    """
    prover, verifier = transport if transport is not None else duplex(start="committed")
    y = random_bits(length, prover_rng)
    salts = send_coin_commitments(prover, y, prover_rng, backend)
    commitments, z = send_coin_challenge(verifier, length, verifier_rng)
    send_coin_reveal(prover, y, salts)
    return check_coin_reveal(verifier, commitments, z)
