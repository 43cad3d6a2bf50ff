"""Exact full-information MDP of the two-user channel and its LP upper bound.

The state is (l1, l2, o): both users' queue occupancy bit vectors plus the
controlled user's channel observation. The reward is the ACK indicator
carried by o, so the long-run average reward equals the system timely
throughput. The optimal average reward is computed with the dual linear
program for average-reward MDPs (recurrent-class variables x(s,a) plus
transient-class variables y(s,a)), and a randomized optimal policy is read
off the optimal solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .channel import Action, Observation
from .env import two_user_env
from .params import SystemParams

# 2^(2D+2) states; D=6 already means 16384 states and a 131072-variable LP.
MAX_DEADLINE = 6

_OBS = (Observation.BUSY, Observation.SUCCESSFUL, Observation.IDLE, Observation.FAILED)


@dataclass(frozen=True)
class FullMdpState:
    """Genie-visible state: both queues' occupancy bits plus the observation."""

    l1: tuple
    l2: tuple
    o: Observation

    @property
    def deadline(self) -> int:
        return len(self.l1)

    def index(self) -> int:
        d = len(self.l1)
        m1 = sum(b << k for k, b in enumerate(self.l1))
        m2 = sum(b << k for k, b in enumerate(self.l2))
        return ((m1 << d) | m2) * 4 + int(self.o)


def state_count(deadline: int) -> int:
    return 1 << (2 * deadline + 2)


def state_index(l1_mask: int, l2_mask: int, o: int, deadline: int) -> int:
    return ((l1_mask << deadline) | l2_mask) * 4 + o


def _bits(mask: int, deadline: int) -> tuple:
    return tuple((mask >> k) & 1 for k in range(deadline))


def enumerate_states(deadline: int):
    """All states in canonical index order."""
    if deadline < 1:
        raise ValueError(f"deadline must be >= 1, got {deadline}")
    if deadline > MAX_DEADLINE:
        raise ValueError(f"deadline {deadline} exceeds the supported cap {MAX_DEADLINE}")
    states = []
    for m1 in range(1 << deadline):
        b1 = _bits(m1, deadline)
        for m2 in range(1 << deadline):
            b2 = _bits(m2, deadline)
            for o in _OBS:
                states.append(FullMdpState(b1, b2, o))
    return states


def reward(s: FullMdpState, a: Optional[int] = None) -> int:
    """ACK indicator: 1 iff the observation reports a success; action-free."""
    return 1 if s.o in (Observation.BUSY, Observation.SUCCESSFUL) else 0


def _row_entries(l1: int, l2: int, a: int, p: SystemParams, deadline: int):
    """Next-state distribution for one (state, action), keyed by
    (l1_mask, l2_mask, obs ordinal). Independent of the current observation."""
    p_b, p_bp = p.p_b, p.p_b_prime
    x2 = 1 if (a == Action.TRANSMIT and l2) else 0
    top = 1 << (deadline - 1)
    acc: dict = {}
    x1_branches = ((1, p.p_t), (0, 1.0 - p.p_t)) if l1 else ((0, 1.0),)
    for x1, px1 in x1_branches:
        if px1 == 0.0:
            continue
        if x1 and x2:
            channel = ((3, 0, 1.0),)                                   # collision
        elif x1:
            channel = ((0, 1, p.p_s), (3, 0, 1.0 - p.p_s))             # BUSY / FAILED
        elif x2:
            channel = ((1, 2, p.p_s_prime), (3, 0, 1.0 - p.p_s_prime)) # SUCCESSFUL / FAILED
        else:
            channel = ((2, 0, 1.0),)                                   # IDLE
        for o2, winner, pc in channel:
            if pc == 0.0:
                continue
            m1, m2 = l1, l2
            if winner == 1:
                m1 &= m1 - 1   # drop the HoL (lowest set) bit
            elif winner == 2:
                m2 &= m2 - 1
            m1 >>= 1           # lead-1 packets expire, the rest age
            m2 >>= 1
            base = px1 * pc
            for a1, pa1 in ((1, p_b), (0, 1.0 - p_b)):
                if pa1 == 0.0:
                    continue
                n1 = m1 | top if a1 else m1
                for a2, pa2 in ((1, p_bp), (0, 1.0 - p_bp)):
                    if pa2 == 0.0:
                        continue
                    key = (n1, (m2 | top) if a2 else m2, o2)
                    acc[key] = acc.get(key, 0.0) + base * pa1 * pa2
    return acc


def transition_row(s: FullMdpState, a: int, params: SystemParams):
    """Exact one-slot distribution over next states for (s, a)."""
    d = s.deadline
    m1 = sum(b << k for k, b in enumerate(s.l1))
    m2 = sum(b << k for k, b in enumerate(s.l2))
    entries = _row_entries(m1, m2, a, params, d)
    return {FullMdpState(_bits(n1, d), _bits(n2, d), _OBS[o]): pr
            for (n1, n2, o), pr in entries.items()}


class TransitionModel:
    """All transition rows as one CSR matrix, rows indexed by 2*state + action."""

    def __init__(self, params: SystemParams, deadline: int, matrix: sparse.csr_matrix):
        self.params = params
        self.deadline = deadline
        self.matrix = matrix

    @property
    def n_states(self) -> int:
        return state_count(self.deadline)

    def row(self, s_index: int, a: int):
        """(next-state indices, probabilities) for one (state, action)."""
        r = self.matrix.getrow(2 * s_index + a)
        return r.indices.copy(), r.data.copy()


def build_transition_model(params: SystemParams, deadline: Optional[int] = None) -> TransitionModel:
    """Enumerate every (state, action) row; rows are validated to sum to 1."""
    d = params.d if deadline is None else deadline
    if d > MAX_DEADLINE:
        raise ValueError(f"deadline {d} exceeds the supported cap {MAX_DEADLINE}")
    n = state_count(d)
    indptr = [0]
    indices = []
    data = []
    for m1 in range(1 << d):
        for m2 in range(1 << d):
            # rows do not depend on the current observation; replicate per o
            per_action = []
            for a in (Action.WAIT, Action.TRANSMIT):
                entries = _row_entries(m1, m2, a, params, d)
                total = sum(entries.values())
                if abs(total - 1.0) > 1e-12:
                    raise AssertionError(
                        f"transition row ({m1},{m2},a={a}) sums to {total!r}")
                cols = sorted((state_index(n1, n2, o, d), pr)
                              for (n1, n2, o), pr in entries.items())
                per_action.append(cols)
            for _ in _OBS:
                for cols in per_action:
                    for c, pr in cols:
                        indices.append(c)
                        data.append(pr)
                    indptr.append(len(indices))
    matrix = sparse.csr_matrix(
        (np.asarray(data), np.asarray(indices), np.asarray(indptr)),
        shape=(2 * n, n))
    return TransitionModel(params, d, matrix)


@dataclass
class LpProblem:
    """Dual LP: maximize r.x subject to stationarity and normalization blocks.

    Variables are [x(s,a); y(s,a)] flattened state-major. The stationarity
    block forces x to be an occupation measure; the normalization block
    (with the positive constants alpha summing to 1) covers transient states
    through y and pins the total recurrent mass to 1.
    """

    objective: np.ndarray      # maximize objective @ v
    a_eq: sparse.csr_matrix
    b_eq: np.ndarray
    n_states: int
    alpha: np.ndarray

    @property
    def n_variables(self) -> int:
        return 4 * self.n_states

    @property
    def n_constraints(self) -> int:
        return 2 * self.n_states


def build_lp(model: TransitionModel, rewards=None, alpha=None) -> LpProblem:
    n = model.n_states
    if rewards is None:
        # reward is the ACK indicator carried by the observation ordinal
        obs = np.arange(n) % 4
        r_state = (obs <= 1).astype(float)
        rewards = np.repeat(r_state, 2)
    rewards = np.asarray(rewards, dtype=float)
    if alpha is None:
        alpha = np.full(n, 1.0 / n)
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (n,) or np.any(alpha <= 0) or abs(alpha.sum() - 1.0) > 1e-9:
        raise ValueError("alpha must be positive per state and sum to 1")

    p = model.matrix                                   # (2n, n)
    agg = sparse.csr_matrix(
        (np.ones(2 * n), np.repeat(np.arange(n), 2), np.arange(0, 2 * n + 1)),
        shape=(2 * n, n))                              # rows (s,a) -> column s
    balance = (agg - p).T.tocsr()                      # (n, 2n)
    zero = sparse.csr_matrix((n, 2 * n))
    a_eq = sparse.vstack(
        [sparse.hstack([balance, zero]),
         sparse.hstack([agg.T.tocsr(), balance])]).tocsr()
    b_eq = np.concatenate([np.zeros(n), alpha])
    objective = np.concatenate([rewards, np.zeros(2 * n)])
    return LpProblem(objective, a_eq, b_eq, n, alpha)


@dataclass(frozen=True)
class LpSolution:
    x: np.ndarray              # (n_states, 2)
    y: np.ndarray              # (n_states, 2)
    objective: float


def solve_lp(lp: LpProblem) -> LpSolution:
    res = linprog(-lp.objective, A_eq=lp.a_eq, b_eq=lp.b_eq, bounds=(0, None),
                  method="highs",
                  options={"primal_feasibility_tolerance": 1e-9,
                           "dual_feasibility_tolerance": 1e-9})
    if res.status != 0 or res.x is None:
        residual = (np.max(np.abs(lp.a_eq @ res.x - lp.b_eq))
                    if res.x is not None else float("nan"))
        raise RuntimeError(
            f"LP solve failed: {res.message} (status {res.status}, "
            f"max equality residual {residual:.3e})")
    v = res.x
    n = lp.n_states
    x = v[:2 * n].reshape(n, 2)
    y = v[2 * n:].reshape(n, 2)
    return LpSolution(x, y, float(lp.objective[:2 * n] @ v[:2 * n]))


@dataclass(frozen=True)
class GeniePolicy:
    """Randomized full-information policy: per-state transmit probability."""

    deadline: int
    transmit_prob: np.ndarray

    def prob_transmit(self, s_index: int) -> float:
        return float(self.transmit_prob[s_index])


def extract_policy(solution: LpSolution, model: TransitionModel,
                   mass_tol: float = 1e-10) -> GeniePolicy:
    """Read the randomized optimal policy off an optimal LP solution.

    Recurrent states use x ratios, transient states fall back to y ratios,
    and states carrying no mass at all default to WAIT. States whose own
    queue is empty are canonicalized to WAIT: both actions have identical
    dynamics there, so the LP may split their mass arbitrarily.
    """
    n = model.n_states
    d = model.deadline
    x, y = solution.x, solution.y
    sx = x.sum(axis=1)
    sy = y.sum(axis=1)
    pt = np.zeros(n)
    use_x = sx > mass_tol
    pt[use_x] = x[use_x, 1] / sx[use_x]
    use_y = ~use_x & (sy > mass_tol)
    pt[use_y] = y[use_y, 1] / sy[use_y]
    l2_mask = (np.arange(n) // 4) & ((1 << d) - 1)
    pt[l2_mask == 0] = 0.0
    return GeniePolicy(d, np.clip(pt, 0.0, 1.0))


def lp_upper_bound(params: SystemParams, deadline: Optional[int] = None):
    """Convenience pipeline: model -> LP -> (optimal value, genie policy)."""
    model = build_transition_model(params, deadline)
    solution = solve_lp(build_lp(model))
    return solution.objective, extract_policy(solution, model)


def d1_optimal(params: SystemParams):
    """Best constant transmit probability at deadline 1 and its throughput.

    The optimum over queue-blind policies is binary: transmit whenever
    backlogged if p_b*p_t < p_s'/(p_s+p_s'), otherwise never transmit.
    """
    p_b, p_bp = params.p_b, params.p_b_prime
    p_s, p_sp, p_t = params.p_s, params.p_s_prime, params.p_t
    denom = p_s + p_sp
    if denom > 0.0 and p_b * p_t < p_sp / denom:
        return 1.0, (p_sp - denom * p_t * p_b) * p_bp + p_s * p_t * p_b
    return 0.0, p_s * p_t * p_b


def d1_genie_value(params: SystemParams) -> float:
    """Deadline-1 optimum when the decision may condition on user 1's backlog.

    Slots decouple at deadline 1, so the optimal policy is the per-state
    myopic choice: always transmit when user 1 is idle, and at double
    backlog pick the better of colliding-risk transmission and yielding.
    This equals the LP optimum; it exceeds the queue-blind value of
    d1_optimal whenever p_t > p_s'/(p_s+p_s').
    """
    p_b, p_bp = params.p_b, params.p_b_prime
    p_s, p_sp, p_t = params.p_s, params.p_s_prime, params.p_t
    return ((1.0 - p_b) * p_bp * p_sp
            + p_b * (1.0 - p_bp) * p_t * p_s
            + p_b * p_bp * max((1.0 - p_t) * p_sp, p_t * p_s))


def evaluate_policy_by_simulation(policy: GeniePolicy, params: SystemParams,
                                  slots: int, seed: int,
                                  window: Optional[int] = None) -> float:
    """Run the genie policy in the simulator; throughput over the final window."""
    d = policy.deadline
    if params.d1 != d or params.d2 != d:
        raise ValueError("policy deadline does not match params")
    env = two_user_env(params, seed=seed)
    stream = env.stream
    queues = env.queues
    obs = env.observations
    pt = policy.transmit_prob.tolist()
    window = slots if window is None else min(window, slots)
    start_count = 0
    warmup = slots - window
    for t in range(slots):
        if t == warmup:
            start_count = env.success_count
        s = _env_state_index(queues, obs, d)
        p = pt[s]
        a = 1 if (p >= 1.0 or (p > 0.0 and stream.random() < p)) else 0
        env.step((a,))
    return (env.success_count - start_count) / window


def _env_state_index(queues, obs, deadline: int) -> int:
    m1 = 0
    for k, c in enumerate(queues[0].counts):
        if c:
            m1 |= 1 << k
    m2 = 0
    for k, c in enumerate(queues[1].counts):
        if c:
            m2 |= 1 << k
    return ((m1 << deadline) | m2) * 4 + obs[1]


def transition_counts(policy: GeniePolicy, params: SystemParams,
                      slots: int, seed: int):
    """Empirical (state, action) -> next-state counts from a genie rollout."""
    d = policy.deadline
    env = two_user_env(params, seed=seed)
    stream = env.stream
    queues = env.queues
    obs = env.observations
    pt = policy.transmit_prob.tolist()
    counts: dict = {}
    s = _env_state_index(queues, obs, d)
    for _ in range(slots):
        p = pt[s]
        a = 1 if (p >= 1.0 or (p > 0.0 and stream.random() < p)) else 0
        env.step((a,))
        s_next = _env_state_index(queues, obs, d)
        row = counts.setdefault((s, a), {})
        row[s_next] = row.get(s_next, 0) + 1
        s = s_next
    return counts


def dump_transition_model(model: TransitionModel, path) -> None:
    """CSV rows (state index, action, next index, probability)."""
    with open(path, "w") as f:
        f.write("state,action,next_state,probability\n")
        for s in range(model.n_states):
            for a in (Action.WAIT, Action.TRANSMIT):
                idx, pr = model.row(s, a)
                for j, p in zip(idx, pr):
                    f.write(f"{s},{Action(a).name},{j},{p:.6g}\n")


def bitstr(bits) -> str:
    """Occupancy bits in lead-time order, e.g. (1,0) -> '10' (urgent packet only)."""
    return "".join(str(b) for b in bits)


def dump_policy(policy: GeniePolicy, path) -> None:
    """CSV in the agents' snapshot format, with transmit probabilities."""
    d = policy.deadline
    with open(path, "w") as f:
        f.write("state,action,p_transmit\n")
        for s, st in enumerate(enumerate_states(d)):
            p = policy.prob_transmit(s)
            if p >= 1.0 - 1e-9:
                name = "TRANSMIT"
            elif p <= 1e-9:
                name = "WAIT"
            else:
                name = "RANDOM"
            f.write(f"l1={bitstr(st.l1)} l2={bitstr(st.l2)} o={st.o.name},{name},{p:.6g}\n")
