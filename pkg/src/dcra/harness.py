"""Experiment harness: seeded runs, parameter sweeps, traces, and presets.

Config files are plain ``key = value`` lines ('#' starts a comment). Known
keys, with types and defaults, are listed in CONFIG_SCHEMA; unknown keys are
rejected. Per-run seeds derive deterministically from the master seed, the
group index, the scheme, and the deadline, so parallel and sequential sweeps
produce identical records.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import mdp
from .agents import AgentConfig, LearningAgent, SCHEMES
from .channel import Action
from .env import Environment, agent_user, aloha_user, two_user_env
from .params import Bernoulli, Poisson, SystemParams


class ConfigError(Exception):
    pass


DEFAULT_WINDOW = 100_000
# Desk-scale budgets: FSRA needs the long budget, everything else converges
# well inside 100k slots.
def default_slots(scheme: str) -> int:
    return 1_000_000 if scheme == "FSRA" else 100_000


_SCHEME_SEED_IDS = {"ALOHA": 0, "FSQA": 1, "FSRA": 2, "HSRA": 3, "TSRA": 4, "BOUND": 5}


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: str = "TSRA"
    schemes: tuple = ()
    d_values: tuple = (2,)
    groups: int = 50
    slots: Optional[int] = None
    window: int = DEFAULT_WINDOW
    seed: int = 0
    jobs: int = 1
    out: Optional[str] = None
    params: Optional[SystemParams] = None
    user1_traffic: str = "bernoulli"
    lam: float = 0.5
    reward_offset: float = 0.0
    trace_interval: int = 1_000
    trace_window: int = 10_000
    preset: Optional[str] = None
    slot_trace: Optional[str] = None

    def __post_init__(self):
        if self.groups < 0:
            raise ConfigError(f"groups must be >= 0, got {self.groups}")
        if self.window < 1:
            raise ConfigError(f"window must be >= 1, got {self.window}")
        if self.slots is not None and self.slots < 1:
            raise ConfigError(f"slots must be >= 1, got {self.slots}")
        if self.user1_traffic not in ("bernoulli", "poisson"):
            raise ConfigError(f"user1_traffic must be bernoulli or poisson")

    def scheme_list(self) -> tuple:
        return self.schemes if self.schemes else (self.scheme,)

    def slots_for(self, scheme: str) -> int:
        return self.slots if self.slots is not None else default_slots(scheme)


def _parse_scheme(v: str) -> str:
    s = v.strip().upper()
    if s not in SCHEMES and s != "BOUND":
        raise ConfigError(f"unknown scheme {v!r}")
    return s


def _parse_schemes(v: str) -> tuple:
    return tuple(_parse_scheme(x) for x in v.split(","))


def _parse_ints(v: str) -> tuple:
    return tuple(int(x) for x in v.split(","))


CONFIG_SCHEMA = {
    "scheme": _parse_scheme,        # single scheme for run/trace/policy
    "schemes": _parse_schemes,      # comma list for sweeps (BOUND allowed)
    "d": _parse_ints,               # comma list of common deadlines
    "groups": int,                  # random parameter groups per (scheme, d)
    "slots": int,                   # per-run slot budget (default per scheme)
    "window": int,                  # final evaluation window in slots
    "seed": int,                    # master seed
    "jobs": int,                    # parallel worker processes
    "out": str,                     # output directory
    "p_b": float,                   # fixed instance: user-1 arrival probability
    "p_b_prime": float,             # fixed instance: user-2 arrival probability
    "p_s": float,                   # fixed instance: user-1 solo success
    "p_s_prime": float,             # fixed instance: user-2 solo success
    "p_t": float,                   # fixed instance: ALOHA transmit probability
    "d1": int,                      # user-1 deadline (robustness runs)
    "d2": int,                      # user-2 deadline (robustness runs)
    "user1_traffic": str,           # bernoulli | poisson
    "lam": float,                   # Poisson rate for user 1
    "reward_offset": float,         # constant c for improved FSQA
    "trace_interval": int,          # slots between trace checkpoints
    "trace_window": int,            # trailing window for trace throughput
    "preset": str,                  # case1 | case2 | case3 | multiuser
    "slot_trace": str,              # per-slot CSV trace path (small runs)
}

_PARAM_KEYS = ("p_b", "p_b_prime", "p_s", "p_s_prime", "p_t")


def parse_config_file(path) -> dict:
    """Read a key=value config file; unknown keys are errors."""
    values: dict = {}
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in CONFIG_SCHEMA:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = CONFIG_SCHEMA[key](val)
            except ConfigError:
                raise
            except ValueError as e:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {e}") from e
    return values


def config_from_values(values: dict) -> ExperimentConfig:
    """Assemble an ExperimentConfig from parsed key=value pairs."""
    values = dict(values)
    params = None
    if any(k in values for k in _PARAM_KEYS):
        missing = [k for k in _PARAM_KEYS if k not in values]
        if missing:
            raise ConfigError(f"fixed instance needs all of {_PARAM_KEYS}; missing {missing}")
        d1 = values.pop("d1", None)
        d2 = values.pop("d2", None)
        d_list = values.get("d", (2,))
        d_default = d_list[0]
        params = SystemParams(*(values.pop(k) for k in _PARAM_KEYS),
                              d1=d1 if d1 is not None else d_default,
                              d2=d2 if d2 is not None else d_default,
                              lam=values.get("lam", 0.0))
    else:
        for k in ("d1", "d2"):
            if k in values:
                raise ConfigError(f"{k} requires a fixed instance (all of {_PARAM_KEYS})")
    if "scheme" in values:
        values["scheme"] = _parse_scheme(values["scheme"])
    if "schemes" in values and isinstance(values["schemes"], str):
        values["schemes"] = _parse_schemes(values["schemes"])
    kwargs = {}
    rename = {"d": "d_values"}
    for k, v in values.items():
        kwargs[rename.get(k, k)] = v
    return ExperimentConfig(params=params, **kwargs)


def load_config(path) -> ExperimentConfig:
    return config_from_values(parse_config_file(path))


@dataclass
class ExperimentRecord:
    scheme: str
    d: int
    params: SystemParams
    seed: int
    slots: int
    window: int
    throughput: float
    rho: Optional[float] = None
    policy: Optional[list] = None
    trace: Optional[list] = None   # (slot, trailing-window throughput)


def _user1_traffic(config: ExperimentConfig, params: SystemParams):
    if config.user1_traffic == "poisson":
        return Poisson(params.lam if params.lam > 0 else config.lam)
    return Bernoulli(params.p_b)


def _train_two_user(env: Environment, agent: LearningAgent, slots: int,
                    window: int, trace_interval: int = 0,
                    slot_trace_writer=None):
    """Core agent-in-the-loop slot iteration (hot path)."""
    stream = env.stream
    queue = env.queues[1]
    obs = env.observations
    encode = agent.encode
    act = agent.act
    update = agent.update
    step = env.step
    warmup = slots - window
    start = 0
    checkpoints = []
    s = encode(queue, obs[1])
    for t in range(slots):
        if t == warmup:
            start = env.success_count
        a = act(s, stream)
        _, r, outcome = step((a,))
        s_next = encode(queue, obs[1])
        update(s, a, r, s_next)
        s = s_next
        if trace_interval and (t + 1) % trace_interval == 0:
            checkpoints.append((t + 1, env.success_count))
        if slot_trace_writer is not None:
            slot_trace_writer.writerow(
                (t + 1, Action(a).name, outcome.feedback.name, env.success_count))
    return (env.success_count - start) / window, checkpoints


def _run_aloha_only(params: SystemParams, traffic, seed: int, slots: int,
                    window: int, trace_interval: int = 0, slot_trace_writer=None):
    env = Environment([aloha_user(params.p_t, traffic, params.p_s, params.d1)],
                      seed=seed)
    warmup = slots - window
    start = 0
    checkpoints = []
    step = env.step
    for t in range(slots):
        if t == warmup:
            start = env.success_count
        _, _, outcome = step(())
        if trace_interval and (t + 1) % trace_interval == 0:
            checkpoints.append((t + 1, env.success_count))
        if slot_trace_writer is not None:
            slot_trace_writer.writerow(
                (t + 1, "-", outcome.feedback.name, env.success_count))
    return (env.success_count - start) / window, checkpoints


def run_single(config: ExperimentConfig, scheme: str, params: SystemParams,
               seed: int, trace_interval: int = 0) -> ExperimentRecord:
    """One deterministic run of a scheme on one instance."""
    scheme = scheme.upper()
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    slots = config.slots_for(scheme)
    window = min(config.window, slots)
    traffic1 = _user1_traffic(config, params)

    writer = None
    trace_file = None
    if config.slot_trace:
        trace_file = open(config.slot_trace, "w", newline="")
        writer = csv.writer(trace_file)
        writer.writerow(("slot", "action", "feedback", "success_count"))
    try:
        if scheme == "ALOHA":
            thr, checkpoints = _run_aloha_only(
                params, traffic1, seed, slots, window, trace_interval, writer)
            record = ExperimentRecord(scheme, params.d1, params, seed, slots,
                                      window, thr)
        else:
            env = two_user_env(params, seed=seed, user1_traffic=traffic1)
            agent = LearningAgent(AgentConfig(
                scheme, params.d2, reward_offset=config.reward_offset))
            thr, checkpoints = _train_two_user(
                env, agent, slots, window, trace_interval, writer)
            record = ExperimentRecord(scheme, params.d2, params, seed, slots,
                                      window, thr, rho=agent.table.rho,
                                      policy=agent.policy_rows())
    finally:
        if trace_file is not None:
            trace_file.close()
    if trace_interval:
        record.trace = windowed_series(checkpoints, trace_interval,
                                       config.trace_window)
    return record


def windowed_series(checkpoints, interval: int, window: int):
    """Trailing-window throughput at each checkpoint.

    Checkpoints are (slot, cumulative successes) every `interval` slots;
    before a full window accumulates, the cumulative rate is used.
    """
    if window % interval:
        raise ConfigError(f"trace window {window} must be a multiple of interval {interval}")
    span = window // interval
    series = []
    for i, (slot, succ) in enumerate(checkpoints):
        if i >= span:
            prev = checkpoints[i - span][1]
            series.append((slot, (succ - prev) / window))
        else:
            series.append((slot, succ / slot))
    return series


def convergence_trace(config: ExperimentConfig,
                      scheme: Optional[str] = None,
                      params: Optional[SystemParams] = None,
                      seed: Optional[int] = None):
    """Windowed-throughput series for one run; returns [(slot, throughput)]."""
    scheme = scheme or config.scheme
    params = params if params is not None else config.params
    if params is None:
        raise ConfigError("convergence_trace needs a fixed instance (params)")
    seed = config.seed if seed is None else seed
    record = run_single(config, scheme, params, seed,
                        trace_interval=config.trace_interval)
    return record.trace


def derive_seed(master: int, group: int, scheme: str, d: int) -> int:
    """Deterministic per-run seed; identical for parallel and sequential runs."""
    sid = _SCHEME_SEED_IDS[scheme.upper()]
    return int(np.random.SeedSequence((master, group, sid, d)).generate_state(1)[0])


def draw_groups(master: int, groups: int):
    """Random parameter tuples, each component uniform on (0,1]."""
    rng = np.random.default_rng(np.random.SeedSequence((master, 0xA11A)))
    out = []
    for _ in range(groups):
        p_b, p_bp, p_s, p_sp, p_t = (1.0 - rng.random(5)).tolist()
        out.append(SystemParams(p_b, p_bp, p_s, p_sp, p_t))
    return out


@dataclass(frozen=True)
class SummaryRow:
    scheme: str
    d: int
    group: int
    seed: int
    throughput: float


def _sweep_worker(task):
    config_kwargs, scheme, params, d, group, seed = task
    config = ExperimentConfig(**config_kwargs)
    params = params.with_deadline(d) if params.d1 == params.d2 else params
    if scheme == "BOUND":
        value, _ = mdp.lp_upper_bound(params.with_deadline(d))
        return SummaryRow(scheme, d, group, seed, value)
    record = run_single(config, scheme, params, seed)
    return SummaryRow(scheme, d, group, seed, record.throughput)


def sweep(config: ExperimentConfig):
    """Paired sweep over (scheme, deadline, group); returns SummaryRow list.

    Parameter tuples are shared across schemes and deadlines so comparisons
    are paired. BOUND rows hold the LP optimum instead of a simulated rate.
    """
    if config.groups == 0:
        return []
    if config.params is not None:
        group_params = [config.params] * config.groups
    else:
        group_params = draw_groups(config.seed, config.groups)
    config_kwargs = {
        "slots": config.slots, "window": config.window,
        "user1_traffic": config.user1_traffic, "lam": config.lam,
        "reward_offset": config.reward_offset,
    }
    tasks = []
    for d in config.d_values:
        for scheme in config.scheme_list():
            for g, params in enumerate(group_params):
                seed = derive_seed(config.seed, g, scheme, d)
                tasks.append((config_kwargs, scheme, params, d, g, seed))
    rows = _run_tasks(tasks, config.jobs)
    if config.out:
        os.makedirs(config.out, exist_ok=True)
        write_summary(rows, os.path.join(config.out, "summary.csv"))
        write_groups(group_params, os.path.join(config.out, "groups.csv"))
    return rows


def _run_tasks(tasks, jobs: int):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_worker, tasks, chunksize=1))
    return [_sweep_worker(t) for t in tasks]


def mean_table(rows):
    """Mean throughput per (scheme, d)."""
    acc: dict = {}
    for r in rows:
        acc.setdefault((r.scheme, r.d), []).append(r.throughput)
    return {k: sum(v) / len(v) for k, v in sorted(acc.items())}


def fmt6(x) -> str:
    """Floats rendered with 6 significant digits for all CSV output."""
    return format(x, ".6g") if isinstance(x, float) else str(x)


def write_summary(rows, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(("scheme", "d", "group", "seed", "throughput"))
        for r in rows:
            w.writerow((r.scheme, r.d, r.group, r.seed, fmt6(r.throughput)))


def read_summary(path):
    rows = []
    with open(path, newline="") as f:
        for rec in csv.DictReader(f):
            rows.append(SummaryRow(rec["scheme"], int(rec["d"]), int(rec["group"]),
                                   int(rec["seed"]), float(rec["throughput"])))
    return rows


def write_groups(group_params, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(("group", "p_b", "p_b_prime", "p_s", "p_s_prime", "p_t"))
        for g, p in enumerate(group_params):
            w.writerow((g, fmt6(p.p_b), fmt6(p.p_b_prime), fmt6(p.p_s),
                        fmt6(p.p_s_prime), fmt6(p.p_t)))


def write_trace(series, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(("slot", "throughput"))
        for slot, thr in series:
            w.writerow((slot, fmt6(thr)))


def write_policy_rows(rows, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(("state", "action", "q_wait", "q_transmit", "rho"))
        for label, action, q_wait, q_transmit, rho in rows:
            w.writerow((label, action, fmt6(q_wait), fmt6(q_transmit), fmt6(rho)))


# ---------------------------------------------------------------------------
# Presets. Baseline comparisons use FSQA (the discounted-Q scheme) since the
# deep-RL baseline is out of scope here.

def robustness_case1(config: ExperimentConfig):
    """Different deadlines: user 1 fixed at d1=5, user 2 sweeps d2 = 1..10."""
    return _robustness(config, [(5, d2, None) for d2 in range(1, 11)])


def robustness_case2(config: ExperimentConfig):
    """Different traffic: user 1 Poisson (lam = 0.1..1.0), both deadlines 2."""
    return _robustness(config, [(2, 2, round(0.1 * i, 1)) for i in range(1, 11)])


def robustness_case3(config: ExperimentConfig):
    """Different traffic and deadlines: Poisson user 1 with d1=4, d2=2."""
    return _robustness(config, [(4, 2, round(0.1 * i, 1)) for i in range(1, 11)])


def _robustness(config: ExperimentConfig, grid):
    """Grid entries are (d1, d2, lam); lam None means Bernoulli user 1.

    Returns rows whose d column is the varying coordinate (d2 for case 1,
    10*lam for cases 2-3).
    """
    schemes = config.scheme_list()
    base_groups = draw_groups(config.seed, config.groups)
    tasks = []
    for d1, d2, lam in grid:
        coord = d2 if lam is None else int(round(10 * lam))
        traffic = "bernoulli" if lam is None else "poisson"
        config_kwargs = {
            "slots": config.slots, "window": config.window,
            "user1_traffic": traffic, "lam": lam if lam else 0.0,
            "reward_offset": config.reward_offset,
        }
        for scheme in schemes:
            for g, p in enumerate(base_groups):
                params = SystemParams(p.p_b, p.p_b_prime, p.p_s, p.p_s_prime,
                                      p.p_t, d1=d1, d2=d2,
                                      lam=lam if lam else 0.0)
                seed = derive_seed(config.seed, g, scheme, coord)
                tasks.append((config_kwargs, scheme, params, None, g, seed))
    rows = _run_tasks_robust(tasks, config.jobs, grid, schemes, config.groups)
    if config.out:
        os.makedirs(config.out, exist_ok=True)
        write_summary(rows, os.path.join(config.out, "summary.csv"))
    return rows


def _robust_worker(task):
    config_kwargs, scheme, params, _, group, seed = task
    config = ExperimentConfig(**config_kwargs)
    record = run_single(config, scheme, params, seed)
    return record.throughput


def _run_tasks_robust(tasks, jobs, grid, schemes, groups):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(_robust_worker, tasks, chunksize=1))
    else:
        values = [_robust_worker(t) for t in tasks]
    rows = []
    i = 0
    for d1, d2, lam in grid:
        coord = d2 if lam is None else int(round(10 * lam))
        for scheme in schemes:
            for g in range(groups):
                rows.append(SummaryRow(scheme, coord, g, tasks[i][5], values[i]))
                i += 1
    return rows


def multi_user_sweep(config: ExperimentConfig, shapes=((5, 3), (7, 2), (10, 1)),
                     max_agents: int = 3):
    """Multi-user cases: (deadline, #ALOHA users) shapes with 1..max_agents
    TSRA agents; every user shares the group's parameter tuple. Returns rows
    (d, n_aloha, n_agents, group, seed, throughput)."""
    group_params = draw_groups(config.seed, config.groups)
    out = []
    for d, n_aloha in shapes:
        for n_agents in range(1, max_agents + 1):
            for g, p in enumerate(group_params):
                seed = derive_seed(config.seed, g, "TSRA", d * 100 + n_aloha * 10 + n_agents)
                thr = _run_multi_user(p.with_deadline(d), n_aloha, n_agents,
                                      config.slots_for("TSRA"),
                                      min(config.window, config.slots_for("TSRA")),
                                      seed)
                out.append((d, n_aloha, n_agents, g, seed, thr))
    if config.out:
        os.makedirs(config.out, exist_ok=True)
        with open(os.path.join(config.out, "multiuser.csv"), "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(("d", "n_aloha", "n_agents", "group", "seed", "throughput"))
            for row in out:
                w.writerow(tuple(fmt6(v) for v in row))
    return out


def _run_multi_user(params: SystemParams, n_aloha: int, n_agents: int,
                    slots: int, window: int, seed: int) -> float:
    """K ALOHA users plus M TSRA agents; all agents learn from the shared ACK."""
    d = params.d
    users = [aloha_user(params.p_t, Bernoulli(params.p_b), params.p_s, d)
             for _ in range(n_aloha)]
    users += [agent_user(Bernoulli(params.p_b_prime), params.p_s_prime, d)
              for _ in range(n_agents)]
    env = Environment(users, seed=seed)
    agents = [LearningAgent(AgentConfig("TSRA", d)) for _ in range(n_agents)]
    stream = env.stream
    obs = env.observations
    queues = env.queues
    idx = env.agent_indices
    warmup = slots - window
    start = 0
    states = [agents[j].encode(queues[idx[j]], obs[idx[j]]) for j in range(n_agents)]
    for t in range(slots):
        if t == warmup:
            start = env.success_count
        actions = tuple(agents[j].act(states[j], stream) for j in range(n_agents))
        _, r, _ = env.step(actions)
        for j in range(n_agents):
            s_next = agents[j].encode(queues[idx[j]], obs[idx[j]])
            agents[j].update(states[j], actions[j], r, s_next)
            states[j] = s_next
    return (env.success_count - start) / window


PRESETS = {
    "case1": robustness_case1,
    "case2": robustness_case2,
    "case3": robustness_case3,
    "multiuser": multi_user_sweep,
}


def run_preset(config: ExperimentConfig):
    if config.preset not in PRESETS:
        raise ConfigError(f"unknown preset {config.preset!r}; expected one of {sorted(PRESETS)}")
    return PRESETS[config.preset](config)
