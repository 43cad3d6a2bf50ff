"""Per-user packet queues keyed by residual lifetime (lead time)."""

from __future__ import annotations


class QueueEmptyError(Exception):
    """Raised when removing the head-of-line packet from an empty queue."""


class PacketQueue:
    """Multiset of packets indexed by lead time.

    counts[k-1] is the number of packets that expire in k slots (k = 1..D).
    Bernoulli traffic keeps every entry in {0,1}; Poisson batches may exceed 1.
    Mutating methods operate in place; use copy() for snapshots.
    """

    __slots__ = ("deadline", "counts")

    def __init__(self, deadline: int, counts=None):
        if deadline < 1:
            raise ValueError(f"deadline must be >= 1, got {deadline}")
        if counts is None:
            counts = [0] * deadline
        else:
            counts = list(counts)
            if len(counts) != deadline:
                raise ValueError(f"counts length {len(counts)} != deadline {deadline}")
            if any(c < 0 for c in counts):
                raise ValueError("counts must be nonnegative")
        self.deadline = deadline
        self.counts = counts

    def copy(self) -> "PacketQueue":
        return PacketQueue(self.deadline, self.counts)

    def total(self) -> int:
        return sum(self.counts)

    def __bool__(self) -> bool:
        return any(self.counts)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PacketQueue)
                and self.deadline == other.deadline
                and self.counts == other.counts)

    def __repr__(self) -> str:
        return f"PacketQueue(deadline={self.deadline}, counts={self.counts})"

    def enqueue_arrivals(self, n: int) -> None:
        """New arrivals enter at full lifetime D."""
        if n < 0:
            raise ValueError(f"arrival count must be nonnegative, got {n}")
        self.counts[-1] += n

    def hol_lead_time(self) -> int:
        """Lead time of the head-of-line packet; 0 when the queue is empty."""
        for k, c in enumerate(self.counts, start=1):
            if c:
                return k
        return 0

    def has_urgent(self) -> int:
        """1 iff some packet expires at the end of the current slot."""
        return 1 if self.counts[0] else 0

    def remove_hol(self) -> None:
        """Remove the head-of-line packet (the one closest to expiry)."""
        for k, c in enumerate(self.counts):
            if c:
                self.counts[k] = c - 1
                return
        raise QueueEmptyError("remove_hol on an empty queue")

    def advance(self) -> int:
        """End-of-slot tick: lead-1 packets expire, the rest age by one slot.

        Returns the number of expired packets.
        """
        counts = self.counts
        expired = counts[0]
        del counts[0]
        counts.append(0)
        return expired

    def presence_bits(self) -> tuple:
        """Occupancy indicator per lead time (Poisson counts clamp to 1)."""
        return tuple(1 if c else 0 for c in self.counts)
