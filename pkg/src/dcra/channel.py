"""Collision-channel resolution and per-user observations."""

from __future__ import annotations

from enum import IntEnum
from typing import NamedTuple, Optional


class Action(IntEnum):
    WAIT = 0
    TRANSMIT = 1


class Observation(IntEnum):
    """What a user learns at a slot boundary from the AP broadcast.

    BUSY: did not transmit, saw an ACK (someone else succeeded).
    SUCCESSFUL: transmitted and saw an ACK.
    IDLE: no broadcast (nobody transmitted).
    FAILED: saw a NACK (collision or channel error).
    """

    BUSY = 0
    SUCCESSFUL = 1
    IDLE = 2
    FAILED = 3


class Feedback(IntEnum):
    ACK = 0
    NACK = 1
    SILENCE = 2


class SlotOutcome(NamedTuple):
    """Channel-level result of one slot."""

    transmitters: tuple
    winner: Optional[int]
    feedback: Feedback


_SILENT = SlotOutcome((), None, Feedback.SILENCE)


def resolve_slot(transmit_flags, solo_success_probs, rng) -> SlotOutcome:
    """Resolve one slot of the unreliable collision channel.

    No transmitter: silence. One transmitter u: ACK with probability
    solo_success_probs[u], NACK otherwise. Two or more: certain collision,
    NACK. rng is consulted only in the solo case.
    """
    transmitters = [i for i, f in enumerate(transmit_flags) if f]
    n = len(transmitters)
    if n == 0:
        return _SILENT
    if n == 1:
        u = transmitters[0]
        if rng.random() < solo_success_probs[u]:
            return SlotOutcome((u,), u, Feedback.ACK)
        return SlotOutcome((u,), None, Feedback.NACK)
    return SlotOutcome(tuple(transmitters), None, Feedback.NACK)


def observation_for(did_transmit: int, outcome: SlotOutcome) -> Observation:
    """Observation a user derives from its own action plus the broadcast."""
    fb = outcome.feedback
    if fb == Feedback.ACK:
        return Observation.SUCCESSFUL if did_transmit else Observation.BUSY
    if fb == Feedback.SILENCE:
        return Observation.IDLE
    return Observation.FAILED


def timely_throughput(success_count: int, window: int) -> float:
    """Successful deliveries per slot over an evaluation window."""
    if window <= 0:
        raise ValueError(f"window must be positive, got {window}")
    return success_count / window
