"""Message transport between the two parties.

Transport is the seam for other carriers (sockets etc.); the in-process duplex
channel below delivers messages through per-direction queues and records every
message in one shared transcript.
"""
import logging
from abc import ABC, abstractmethod
from collections import deque
from typing import Deque, Dict, Optional, Tuple

from protocol.messages import PROVER, VERIFIER, Message, OrderValidator, ProtocolError, Transcript

logger = logging.getLogger(__name__)


class Transport(ABC):
    role: str

    @abstractmethod
    def send(self, msg: Message) -> None:
        pass

    @abstractmethod
    def recv(self, expected: Optional[Tuple[str, ...]] = None) -> Message:
        pass


class _Channel:
    def __init__(self, transcript: Transcript, start: str):
        self.transcript = transcript
        self.validator = OrderValidator(start)
        self.queues: Dict[str, Deque[Message]] = {PROVER: deque(), VERIFIER: deque()}


class InProcessEndpoint(Transport):
    def __init__(self, channel: _Channel, role: str):
        self._channel = channel
        self.role = role

    @property
    def transcript(self) -> Transcript:
        return self._channel.transcript

    def send(self, msg: Message) -> None:
        if msg.role != self.role:
            raise ProtocolError(f"{self.role} endpoint cannot send as {msg.role}")
        self._channel.validator.feed(msg)
        self._channel.transcript.append(msg)
        peer = VERIFIER if self.role == PROVER else PROVER
        self._channel.queues[peer].append(msg)
        logger.debug(f"{self.role} -> {peer}: {msg.kind}")

    def recv(self, expected: Optional[Tuple[str, ...]] = None) -> Message:
        queue = self._channel.queues[self.role]
        if not queue:
            raise ProtocolError(f"{self.role} expected a message but none is pending")
        msg = queue.popleft()
        if expected is not None and msg.kind not in expected:
            raise ProtocolError(f"{self.role} expected {expected}, got {msg.kind}")
        return msg


def duplex(transcript: Optional[Transcript] = None, start: str = "start") -> Tuple[InProcessEndpoint, InProcessEndpoint]:
    """Connected (prover, verifier) endpoints sharing one transcript."""
    channel = _Channel(transcript if transcript is not None else Transcript(), start)
    return InProcessEndpoint(channel, PROVER), InProcessEndpoint(channel, VERIFIER)
