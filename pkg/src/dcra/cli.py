"""Command-line front end: run, sweep, bound, trace, policy."""

from __future__ import annotations

import argparse
import os
import sys

from . import harness, mdp
from .harness import (ConfigError, ExperimentConfig, config_from_values, fmt6,
                      mean_table, parse_config_file)
from .params import DEFAULT_PARAMS


def _base_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="key=value experiment config file")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out", help="output directory")
    p.add_argument("--jobs", type=int, help="parallel worker processes")
    p.add_argument("--scheme", help="ALOHA, FSQA, FSRA, HSRA, TSRA (or BOUND where it applies)")
    p.add_argument("--slots", type=int, help="slots per run")
    p.add_argument("--window", type=int, help="final evaluation window")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcra",
        description="Delay-constrained random access: simulation, learning schemes, LP bound")
    sub = parser.add_subparsers(dest="command", required=True)
    base = _base_parser()
    sub.add_parser("run", parents=[base], help="single seeded run")
    sweep = sub.add_parser("sweep", parents=[base], help="paired parameter sweep")
    sweep.add_argument("--groups", type=int, help="random parameter groups")
    sweep.add_argument("--d", help="comma list of deadlines")
    sweep.add_argument("--preset", help="case1 | case2 | case3 | multiuser")
    bound = sub.add_parser("bound", parents=[base], help="LP upper bound for an instance")
    bound.add_argument("--d", type=int, help="common deadline")
    trace = sub.add_parser("trace", parents=[base], help="convergence trace")
    trace.add_argument("--interval", type=int, help="checkpoint interval in slots")
    trace.add_argument("--trace-window", type=int, help="trailing window for the trace")
    sub.add_parser("policy", parents=[base],
                   help="dump a learned policy (or the genie policy with --scheme BOUND)")
    return parser


def _gather(args) -> ExperimentConfig:
    values = parse_config_file(args.config) if args.config else {}
    overrides = {
        "seed": args.seed, "out": args.out, "jobs": args.jobs,
        "scheme": args.scheme, "slots": args.slots, "window": args.window,
        "groups": getattr(args, "groups", None),
        "preset": getattr(args, "preset", None),
        "trace_interval": getattr(args, "interval", None),
        "trace_window": getattr(args, "trace_window", None),
    }
    d = getattr(args, "d", None)
    if d is not None:
        overrides["d"] = str(d)
    for k, v in overrides.items():
        if v is not None:
            values[k] = CONFIG_COERCE[k](v) if isinstance(v, str) else v
    return config_from_values(values)


CONFIG_COERCE = {k: f for k, f in harness.CONFIG_SCHEMA.items()}


def _instance(config: ExperimentConfig):
    params = config.params if config.params is not None else DEFAULT_PARAMS
    return params.with_deadline(config.d_values[0]) if params.d1 == params.d2 else params


def cmd_run(config: ExperimentConfig) -> int:
    params = _instance(config)
    record = harness.run_single(config, config.scheme, params, config.seed)
    print(f"scheme={record.scheme} d={record.d} seed={record.seed} "
          f"slots={record.slots} window={record.window}")
    print(f"throughput={fmt6(record.throughput)}"
          + (f" rho={fmt6(record.rho)}" if record.rho is not None else ""))
    if config.out:
        os.makedirs(config.out, exist_ok=True)
        harness.write_summary(
            [harness.SummaryRow(record.scheme, record.d, 0, record.seed,
                                record.throughput)],
            os.path.join(config.out, "summary.csv"))
        if record.policy:
            harness.write_policy_rows(record.policy,
                                      os.path.join(config.out, "policy.csv"))
    return 0


def cmd_sweep(config: ExperimentConfig) -> int:
    if config.preset:
        rows = harness.run_preset(config)
        if config.preset == "multiuser":
            for d, n_aloha, n_agents, group, seed, thr in rows:
                print(f"d={d} aloha={n_aloha} agents={n_agents} group={group} "
                      f"throughput={fmt6(thr)}")
            return 0
    else:
        rows = harness.sweep(config)
    for (scheme, d), mean in mean_table(rows).items():
        print(f"scheme={scheme} d={d} mean_throughput={fmt6(mean)}")
    return 0


def cmd_bound(config: ExperimentConfig) -> int:
    params = _instance(config)
    value, policy = mdp.lp_upper_bound(params)
    print(f"d={params.d} lp_upper_bound={fmt6(value)}")
    if params.d == 1:
        p_star, r = mdp.d1_optimal(params)
        print(f"d1_binary_policy: transmit_prob={fmt6(p_star)} value={fmt6(r)}")
    if config.out:
        os.makedirs(config.out, exist_ok=True)
        mdp.dump_policy(policy, os.path.join(config.out, "policy.csv"))
    return 0


def cmd_trace(config: ExperimentConfig) -> int:
    params = _instance(config)
    series = harness.convergence_trace(config, config.scheme, params, config.seed)
    if config.out:
        os.makedirs(config.out, exist_ok=True)
        harness.write_trace(series, os.path.join(config.out, "trace.csv"))
        print(f"wrote {len(series)} checkpoints to {config.out}/trace.csv")
    else:
        for slot, thr in series:
            print(f"{slot},{fmt6(thr)}")
    return 0


def cmd_policy(config: ExperimentConfig) -> int:
    params = _instance(config)
    out_path = None
    if config.out:
        os.makedirs(config.out, exist_ok=True)
        out_path = os.path.join(config.out, "policy.csv")
    if config.scheme == "BOUND":
        value, policy = mdp.lp_upper_bound(params)
        print(f"d={params.d} lp_upper_bound={fmt6(value)}")
        if out_path:
            mdp.dump_policy(policy, out_path)
    else:
        record = harness.run_single(config, config.scheme, params, config.seed)
        print(f"scheme={record.scheme} throughput={fmt6(record.throughput)}")
        if out_path and record.policy:
            harness.write_policy_rows(record.policy, out_path)
        elif record.policy and not out_path:
            for label, action, *_ in record.policy:
                print(f"{label}: {action}")
    return 0


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "bound": cmd_bound,
            "trace": cmd_trace, "policy": cmd_policy}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _gather(args)
        return COMMANDS[args.command](config)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
