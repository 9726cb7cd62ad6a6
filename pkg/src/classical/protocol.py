# src/classical/protocol.py

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import ConfigurationError

logger = logging.getLogger(__name__)


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True, slots=True)
class MinuteRecord:
    """One time slot of the ball-and-pipe protocol."""
    minute: int
    parity: Parity
    bit: int
    ball_sent: bool
    ball_received: bool
    channel_crossing: bool
    decoded: int

    @property
    def kept(self) -> bool:
        # Alice post-selects on the minutes in which nothing arrived
        return not self.ball_received

    def as_row(self) -> Dict[str, object]:
        return {
            "minute": self.minute,
            "parity": self.parity.value,
            "bit": self.bit,
            "sent": self.ball_sent,
            "received": self.ball_received,
            "kept": self.kept,
        }


@dataclass(frozen=True, slots=True)
class ClassicalTranscript:
    minutes: Tuple[MinuteRecord, ...]

    @property
    def decoded_bits(self) -> Tuple[int, ...]:
        return tuple(r.decoded for r in self.minutes)

    @property
    def kept_minutes(self) -> Tuple[int, ...]:
        return tuple(r.minute for r in self.minutes if r.kept)

    @property
    def discard_count(self) -> int:
        return sum(1 for r in self.minutes if not r.kept)

    @property
    def discard_fraction(self) -> float:
        return self.discard_count / len(self.minutes)

    @property
    def crossing_count(self) -> int:
        return sum(1 for r in self.minutes if r.channel_crossing)

    @property
    def all_decoded_correctly(self) -> bool:
        return all(r.decoded == r.bit for r in self.minutes)

    @property
    def kept_counterfactual(self) -> bool:
        """Every post-selected bit decodes correctly and no ball crossed the pipe for it."""
        return all(r.decoded == r.bit and not r.channel_crossing for r in self.minutes if r.kept)

    def rows(self) -> List[Dict[str, object]]:
        return [r.as_row() for r in self.minutes]


def _check_bits(message: Sequence[int]) -> Tuple[int, ...]:
    bits = tuple(int(b) for b in message)
    if not bits:
        raise ConfigurationError("message must hold at least one bit")
    if any(b not in (0, 1) for b in bits):
        raise ConfigurationError("message bits must be 0 or 1")
    return bits


def balanced_message(length: int, seed: Optional[int] = None) -> Tuple[int, ...]:
    """``length`` fair coin flips from numpy's default generator."""
    if length < 1:
        raise ConfigurationError(f"message length must be positive, got {length}")
    rng = np.random.default_rng(seed)
    return tuple(int(b) for b in rng.integers(0, 2, size=length))


def decode(parity: Parity, received: bool) -> int:
    if parity is Parity.EVEN:
        return 1 if received else 0
    return 0 if received else 1


def run_classical(message: Sequence[int], seed: Optional[int] = None) -> ClassicalTranscript:
    """
    Bob rolls a ball through the pipe on even minutes to send a 1 and on odd minutes
    to send a 0; otherwise he stays idle. Every rolled ball crosses the pipe and
    reaches Alice within the minute. ``seed`` is accepted for interface symmetry with
    the message generator: the protocol itself draws no randomness.
    """
    bits = _check_bits(message)
    records = []
    for minute, bit in enumerate(bits):
        parity = Parity.EVEN if minute % 2 == 0 else Parity.ODD
        sent = bit == 1 if parity is Parity.EVEN else bit == 0
        records.append(MinuteRecord(
            minute=minute,
            parity=parity,
            bit=bit,
            ball_sent=sent,
            ball_received=sent,
            channel_crossing=sent,
            decoded=decode(parity, sent),
        ))
    transcript = ClassicalTranscript(minutes=tuple(records))
    logger.info("classical run: %d minute(s), %d discarded", len(bits), transcript.discard_count)
    return transcript
