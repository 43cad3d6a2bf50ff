"""Slot-synchronous channel environment for ALOHA users and access agents.

One slot runs in a fixed order: observations deliver the previous slot's
feedback, transmit decisions are made, the channel resolves, the winner's
head-of-line packet leaves, every queue ages (lead-1 packets expire), and
new arrivals enter at full lifetime for the next slot. A packet with
deadline 1 that arrives for slot t is therefore gone by slot t+1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import Feedback, Observation, resolve_slot
from .params import Bernoulli, Poisson, TrafficModel
from .queues import PacketQueue


class UniformStream:
    """Buffered uniform(0,1) draws over a numpy Generator.

    Provides .random() and .poisson() so channel and traffic code can treat
    it like a Generator; buffering keeps the per-draw cost low in the slot
    loop. The draw sequence is a pure function of the seed.
    """

    __slots__ = ("_rng", "_buf", "_i", "_block")

    def __init__(self, rng: np.random.Generator, block: int = 8192):
        self._rng = rng
        self._block = block
        self._buf = rng.random(block).tolist()
        self._i = 0

    def random(self) -> float:
        i = self._i
        if i == self._block:
            self._buf = self._rng.random(self._block).tolist()
            i = 0
        self._i = i + 1
        return self._buf[i]

    def poisson(self, lam: float) -> int:
        return int(self._rng.poisson(lam))


@dataclass(frozen=True)
class UserSpec:
    """One user sharing the channel.

    aloha_p_t None means the user is agent-controlled; otherwise the user
    transmits its head-of-line packet with that probability whenever its
    queue is nonempty.
    """

    traffic: TrafficModel
    success_prob: float
    deadline: int
    aloha_p_t: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.success_prob <= 1.0:
            raise ValueError(f"success_prob must be in [0,1], got {self.success_prob}")
        if self.deadline < 1:
            raise ValueError(f"deadline must be >= 1, got {self.deadline}")
        if self.aloha_p_t is not None and not 0.0 <= self.aloha_p_t <= 1.0:
            raise ValueError(f"aloha_p_t must be in [0,1], got {self.aloha_p_t}")


def aloha_user(p_t: float, traffic: TrafficModel, success_prob: float,
               deadline: int) -> UserSpec:
    return UserSpec(traffic, success_prob, deadline, aloha_p_t=p_t)


def agent_user(traffic: TrafficModel, success_prob: float, deadline: int) -> UserSpec:
    return UserSpec(traffic, success_prob, deadline)


class Environment:
    """N users (any mix of ALOHA and agent-controlled) on one collision channel.

    Construct a fresh instance per run; the whole slot sequence is a pure
    function of (users, seed). Initial observations are IDLE and slot-1
    arrivals are drawn at construction time.
    """

    def __init__(self, users, seed=0):
        self.users = tuple(users)
        if not self.users:
            raise ValueError("at least one user required")
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        self.stream = UniformStream(rng)
        self.agent_indices = tuple(i for i, u in enumerate(self.users) if u.aloha_p_t is None)
        self.queues = [PacketQueue(u.deadline) for u in self.users]
        self.observations = [Observation.IDLE] * len(self.users)
        self.success_count = 0
        self.t = 1
        # traffic fast path: (is_bernoulli, probability or rate) per user
        self._traffic = [(isinstance(u.traffic, Bernoulli),
                          u.traffic.p if isinstance(u.traffic, Bernoulli) else u.traffic.lam)
                         for u in self.users]
        self._succ = [u.success_prob for u in self.users]
        self._pt = [u.aloha_p_t for u in self.users]
        # arrivals for slot 1
        stream = self.stream
        for i, (is_b, v) in enumerate(self._traffic):
            n = (1 if stream.random() < v else 0) if is_b else stream.poisson(v)
            if n:
                self.queues[i].enqueue_arrivals(n)

    def step(self, actions=()):
        """Run one slot; actions align with agent_indices (1 = transmit).

        Returns (observations, reward, outcome). observations is the live
        per-user list (already updated for the next slot); reward is the
        shared ACK bit credited to every agent; outcome is the channel-level
        result of this slot. Transmitting on an empty queue is a no-op.
        """
        stream = self.stream
        queues = self.queues
        n_users = len(self.users)
        flags = [0] * n_users
        ai = 0
        pts = self._pt
        for i in range(n_users):
            pt = pts[i]
            if pt is None:
                if actions[ai] and queues[i]:
                    flags[i] = 1
                ai += 1
            elif queues[i] and stream.random() < pt:
                flags[i] = 1

        outcome = resolve_slot(flags, self._succ, stream)
        fb = outcome.feedback
        if fb == Feedback.ACK:
            queues[outcome.winner].remove_hol()
            self.success_count += 1
            reward = 1
            obs_tx, obs_wait = Observation.SUCCESSFUL, Observation.BUSY
        else:
            reward = 0
            if fb == Feedback.SILENCE:
                obs_tx = obs_wait = Observation.IDLE
            else:
                obs_tx = obs_wait = Observation.FAILED

        for i, (is_b, v) in enumerate(self._traffic):
            q = queues[i]
            q.advance()
            n = (1 if stream.random() < v else 0) if is_b else stream.poisson(v)
            if n:
                q.enqueue_arrivals(n)

        obs = self.observations
        for i in range(n_users):
            obs[i] = obs_tx if flags[i] else obs_wait
        self.t += 1
        return obs, reward, outcome

    def full_state(self):
        """Read-only full-information view (l1 bits, l2 bits, agent observation).

        Defined for the canonical two-user layout: user 0 is the ALOHA user,
        user 1 the agent. Model-free agents never receive this.
        """
        if len(self.users) != 2 or self.agent_indices != (1,):
            raise ValueError("full_state is defined for the (ALOHA, agent) two-user layout")
        return (self.queues[0].presence_bits(), self.queues[1].presence_bits(),
                self.observations[1])

    def throughput(self) -> float:
        """Successes per slot over all slots stepped so far."""
        elapsed = self.t - 1
        return self.success_count / elapsed if elapsed > 0 else 0.0


def two_user_env(params, seed=0, user1_traffic: Optional[TrafficModel] = None) -> Environment:
    """Canonical layout: ALOHA user 1 plus one agent-controlled user 2."""
    traffic1 = user1_traffic if user1_traffic is not None else Bernoulli(params.p_b)
    return Environment(
        [aloha_user(params.p_t, traffic1, params.p_s, params.d1),
         agent_user(Bernoulli(params.p_b_prime), params.p_s_prime, params.d2)],
        seed=seed)
