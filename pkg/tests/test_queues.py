"""Packet queue semantics: arrivals, head-of-line, expiry."""

import numpy as np
import pytest

from dcra.params import Bernoulli, Poisson, sample_arrivals
from dcra.queues import PacketQueue, QueueEmptyError


def q(*counts):
    return PacketQueue(len(counts), counts)


class TestSampleArrivals:
    def test_bernoulli_certain(self):
        rng = np.random.default_rng(0)
        assert all(sample_arrivals(Bernoulli(1.0), rng) == 1 for _ in range(100))

    def test_poisson_zero_rate(self):
        rng = np.random.default_rng(0)
        assert all(sample_arrivals(Poisson(0.0), rng) == 0 for _ in range(100))

    def test_poisson_mean(self):
        rng = np.random.default_rng(7)
        draws = rng.poisson(0.5, size=1_000_000)
        assert abs(draws.mean() - 0.5) < 0.01

    def test_bernoulli_rate_within_binomial_bounds(self):
        p = 0.3
        n = 200_000
        rng = np.random.default_rng(3)
        hits = sum(sample_arrivals(Bernoulli(p), rng) for _ in range(n))
        sigma = (p * (1 - p) / n) ** 0.5
        assert abs(hits / n - p) < 3 * sigma


class TestEnqueue:
    def test_single_arrival_enters_at_full_lifetime(self):
        queue = q(0, 0, 0)
        queue.enqueue_arrivals(1)
        assert queue.counts == [0, 0, 1]

    def test_poisson_batch(self):
        queue = q(0)
        queue.enqueue_arrivals(2)
        assert queue.counts == [2]

    def test_zero_is_identity(self):
        queue = q(1, 0, 2)
        queue.enqueue_arrivals(0)
        assert queue.counts == [1, 0, 2]


class TestHolAndUrgent:
    def test_hol_smallest_nonzero_lead(self):
        assert q(0, 1, 1).hol_lead_time() == 2

    def test_hol_empty_is_zero(self):
        assert q(0, 0, 0).hol_lead_time() == 0

    def test_hol_lead_one(self):
        assert q(2, 0, 0).hol_lead_time() == 1

    def test_urgent(self):
        assert q(1, 0).has_urgent() == 1
        assert q(0, 1).has_urgent() == 0
        assert q(0, 0).has_urgent() == 0

    def test_hol_one_iff_urgent(self):
        for deadline in range(1, 5):
            for pattern in range(1 << deadline):
                queue = q(*((pattern >> k) & 1 for k in range(deadline)))
                assert (queue.hol_lead_time() == 1) == bool(queue.has_urgent())


class TestRemoveHol:
    def test_removes_most_urgent(self):
        queue = q(0, 1, 1)
        queue.remove_hol()
        assert queue.counts == [0, 0, 1]

    def test_decrements_count(self):
        queue = q(2, 0)
        queue.remove_hol()
        assert queue.counts == [1, 0]

    def test_empty_queue_is_an_error(self):
        with pytest.raises(QueueEmptyError):
            q(0, 0).remove_hol()


class TestAdvance:
    def test_shift_and_drop(self):
        queue = q(1, 0, 1)
        assert queue.advance() == 1
        assert queue.counts == [0, 1, 0]

    def test_empty(self):
        queue = q(0, 0)
        assert queue.advance() == 0
        assert queue.counts == [0, 0]

    def test_everything_expires_at_deadline_one(self):
        queue = q(3)
        assert queue.advance() == 3
        assert queue.counts == [0]

    def test_conservation(self):
        rng = np.random.default_rng(11)
        queue = PacketQueue(4)
        for _ in range(2000):
            queue.enqueue_arrivals(int(rng.integers(0, 3)))
            before = queue.total()
            expired = queue.advance()
            assert queue.total() == before - expired

    def test_enqueue_then_advance_vs_advance_then_late_enqueue(self):
        # matches the slot timeline: for D > 1, an arrival placed at lead D
        # before the tick equals an arrival placed at lead D-1 after it
        a = q(1, 0, 0)
        a.enqueue_arrivals(1)
        a.advance()
        b = q(1, 0, 0)
        b.advance()
        b.counts[1] += 1  # lead D-1
        assert a.counts == b.counts
        # at D = 1 the orders differ: the early arrival expires immediately
        c = q(0)
        c.enqueue_arrivals(1)
        assert c.advance() == 1


class TestValidation:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            PacketQueue(2, [0, 0, 0])

    def test_negative_counts(self):
        with pytest.raises(ValueError):
            PacketQueue(2, [0, -1])

    def test_bernoulli_traffic_keeps_counts_binary(self):
        rng = np.random.default_rng(5)
        queue = PacketQueue(3)
        for _ in range(5000):
            queue.enqueue_arrivals(sample_arrivals(Bernoulli(0.6), rng))
            assert all(c in (0, 1) for c in queue.counts)
            queue.advance()
