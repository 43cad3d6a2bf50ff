"""Tabular access agents: state encoders, exploration schedule, Q/R updates.

Four learning schemes share one machinery and differ only in what they
encode alongside the four-valued channel observation:

  FSQA  - full queue occupancy bits, Q-learning (discounted)
  FSRA  - full queue occupancy bits, R-learning (average reward)
  HSRA  - head-of-line lead time only, R-learning
  TSRA  - urgent-packet bit only, R-learning
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import Action, Observation
from .queues import PacketQueue

SCHEMES = ("ALOHA", "FSQA", "FSRA", "HSRA", "TSRA")
LEARNING_SCHEMES = ("FSQA", "FSRA", "HSRA", "TSRA")


def full_state_count(deadline: int) -> int:
    return 4 << deadline  # 2^(D+2)


def hol_state_count(deadline: int) -> int:
    return 4 * (deadline + 1)


TINY_STATE_COUNT = 8


def encode_full(l2_bits, o: Observation) -> int:
    """Index of (queue occupancy bits, observation); bijective on [0, 2^(D+2))."""
    mask = 0
    for k, b in enumerate(l2_bits):
        if b:
            mask |= 1 << k
    return mask * 4 + int(o)


def encode_hol(h: int, o: Observation, deadline: int) -> int:
    """Index of (head-of-line lead time, observation); h=0 means empty queue."""
    if not 0 <= h <= deadline:
        raise ValueError(f"HoL lead time {h} outside [0, {deadline}]")
    return h * 4 + int(o)


def encode_tiny(f: int, o: Observation) -> int:
    """Index of (urgent-packet bit, observation); bijective on [0, 8)."""
    return f * 4 + int(o)


def epsilon(t: int, decay: float = 0.995, floor: float = 0.01) -> float:
    """Exploration probability at slot t >= 1: max(decay^(t-1), floor)."""
    return max(decay ** (t - 1), floor)


def reward_with_offset(o_next: Observation, c: float = 0.0) -> float:
    """ACK indicator minus the constant offset c (improved Q-learning variant)."""
    ack = 1.0 if o_next in (Observation.BUSY, Observation.SUCCESSFUL) else 0.0
    return ack - c


class ValueTable:
    """Dense state-action values plus the average-reward estimate rho.

    Rows are plain Python lists because the per-slot update is the hot path.
    """

    __slots__ = ("q", "rho", "alpha", "beta", "gamma")

    def __init__(self, n_states: int, alpha: float = 0.01, beta: float = 0.01,
                 gamma: float = 0.9):
        self.q = [[0.0, 0.0] for _ in range(n_states)]
        self.rho = 0.0
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma

    @property
    def n_states(self) -> int:
        return len(self.q)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.q, dtype=float)


def act_epsilon_greedy(table: ValueTable, s: int, eps: float, rng) -> int:
    """Greedy action with probability 1-eps, uniform otherwise; ties uniform."""
    if eps > 0.0 and rng.random() < eps:
        return Action.WAIT if rng.random() < 0.5 else Action.TRANSMIT
    q_wait, q_transmit = table.q[s]
    if q_transmit > q_wait:
        return Action.TRANSMIT
    if q_wait > q_transmit:
        return Action.WAIT
    return Action.WAIT if rng.random() < 0.5 else Action.TRANSMIT


def q_learning_update(table: ValueTable, s: int, a: int, r: float, s_next: int) -> None:
    """One-step discounted update: q += alpha*(r + gamma*max q' - q)."""
    row = table.q[s]
    n0, n1 = table.q[s_next]
    m = n0 if n0 > n1 else n1
    row[a] += table.alpha * (r + table.gamma * m - row[a])


def r_learning_update(table: ValueTable, s: int, a: int, r: float, s_next: int) -> None:
    """Average-reward update; one temporal difference drives both q and rho.

    The difference is computed once from pre-update values, then applied to
    the table entry and to rho.
    """
    row = table.q[s]
    n0, n1 = table.q[s_next]
    m = n0 if n0 > n1 else n1
    d = r + m - row[a] - table.rho
    row[a] += table.alpha * d
    table.rho += table.beta * d


def aloha_act(p_t: float, queue: PacketQueue, rng) -> int:
    """Slotted ALOHA: transmit the HoL packet with probability p_t if backlogged."""
    if not queue:
        return Action.WAIT
    return Action.TRANSMIT if rng.random() < p_t else Action.WAIT


@dataclass(frozen=True)
class AgentConfig:
    scheme: str
    deadline: int
    reward_offset: float = 0.0   # c in [0,1]; nonzero only for improved FSQA
    eps_decay: float = 0.995
    eps_floor: float = 0.01
    alpha: float = 0.01
    beta: float = 0.01
    gamma: float = 0.9

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not 0.0 <= self.reward_offset <= 1.0:
            raise ValueError(f"reward offset must be in [0,1], got {self.reward_offset}")
        if self.deadline < 1:
            raise ValueError(f"deadline must be >= 1, got {self.deadline}")


class LearningAgent:
    """One tabular agent; owns its value table and exploration state."""

    def __init__(self, config: AgentConfig):
        if config.scheme not in LEARNING_SCHEMES:
            raise ValueError(f"{config.scheme} is not a learning scheme")
        self.config = config
        self.scheme = config.scheme
        self.deadline = config.deadline
        if self.scheme in ("FSQA", "FSRA"):
            n = full_state_count(self.deadline)
        elif self.scheme == "HSRA":
            n = hol_state_count(self.deadline)
        else:
            n = TINY_STATE_COUNT
        self.table = ValueTable(n, config.alpha, config.beta, config.gamma)
        self._eps = 1.0
        self._eps_decay = config.eps_decay
        self._eps_floor = config.eps_floor
        self._is_q = self.scheme == "FSQA"
        self._c = config.reward_offset

    def encode(self, queue: PacketQueue, obs) -> int:
        scheme = self.scheme
        if scheme == "TSRA":
            return (4 if queue.counts[0] else 0) + obs
        if scheme == "HSRA":
            return queue.hol_lead_time() * 4 + obs
        mask = 0
        for k, c in enumerate(queue.counts):
            if c:
                mask |= 1 << k
        return mask * 4 + obs

    def act(self, s: int, rng) -> int:
        """Epsilon-greedy action for the current slot; decays epsilon once."""
        eps = self._eps
        self._eps = max(eps * self._eps_decay, self._eps_floor)
        return act_epsilon_greedy(self.table, s, eps, rng)

    def update(self, s: int, a: int, ack: int, s_next: int) -> None:
        """Learn from one slot; ack is the shared ACK bit for that slot."""
        r = ack - self._c
        if self._is_q:
            q_learning_update(self.table, s, a, r, s_next)
        else:
            r_learning_update(self.table, s, a, r, s_next)

    def greedy_action(self, s: int) -> int:
        q_wait, q_transmit = self.table.q[s]
        return Action.TRANSMIT if q_transmit > q_wait else Action.WAIT

    def state_components(self, s: int):
        """Decode a state index back to its (queue component, observation) pair."""
        o = Observation(s % 4)
        rest = s // 4
        if self.scheme in ("FSQA", "FSRA"):
            bits = tuple((rest >> k) & 1 for k in range(self.deadline))
            return bits, o
        return rest, o

    def effective_policy(self):
        """Greedy action per state, with provably-empty-queue states as WAIT.

        When the encoded queue component says the queue is empty, TRANSMIT
        is a no-op and the learned preference between the two actions is
        pure noise; the action actually taken on air is WAIT.
        """
        actions = []
        for s in range(self.table.n_states):
            comp, _ = self.state_components(s)
            if self.scheme in ("FSQA", "FSRA"):
                empty = not any(comp)
            elif self.scheme == "HSRA":
                empty = comp == 0
            else:
                empty = False
            actions.append(Action.WAIT if empty else self.greedy_action(s))
        return actions

    def policy_rows(self):
        """Snapshot rows: (state label, action name, q_wait, q_transmit, rho)."""
        rows = []
        policy = self.effective_policy()
        for s in range(self.table.n_states):
            comp, o = self.state_components(s)
            if self.scheme in ("FSQA", "FSRA"):
                label = f"l2={''.join(str(b) for b in comp)} o={o.name}"
            elif self.scheme == "HSRA":
                label = f"h={comp} o={o.name}"
            else:
                label = f"f={comp} o={o.name}"
            q_wait, q_transmit = self.table.q[s]
            rows.append((label, Action(policy[s]).name, q_wait, q_transmit, self.table.rho))
        return rows
