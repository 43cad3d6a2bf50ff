"""Robustness presets and a small multi-user case.

Case 1: mismatched deadlines (ALOHA user at d1=5, agent sweeps d2).
Case 2: Poisson traffic for the ALOHA user, common deadline 2.
Case 3: Poisson ALOHA user at d1=4 against a Bernoulli agent at d2=2.
Multi-user: several ALOHA users sharing the channel with 1..N TSRA agents.

FSQA serves as the learned baseline in the robustness comparisons.

Run: python demos/07_robustness_and_multiuser.py   (a few minutes)
"""

import os

from dcra.harness import (ExperimentConfig, mean_table, multi_user_sweep,
                          robustness_case1, robustness_case2, robustness_case3)

JOBS = os.cpu_count() or 1
config = ExperimentConfig(schemes=("TSRA", "FSQA"), groups=6,
                          slots=50_000, window=50_000, seed=5, jobs=JOBS)

for name, preset, coord in (("Case 1 (deadline mismatch)", robustness_case1, "d2"),
                            ("Case 2 (Poisson user 1)", robustness_case2, "10*lam"),
                            ("Case 3 (Poisson + mismatch)", robustness_case3, "10*lam")):
    rows = preset(config)
    means = mean_table(rows)
    coords = sorted({r.d for r in rows})
    print(f"\n{name}: mean timely throughput by {coord}")
    print("   " + coord.rjust(8) + "".join(f"{c:>8}" for c in coords))
    for scheme in ("TSRA", "FSQA"):
        print(f"   {scheme:>8}" + "".join(f"{means[(scheme, c)]:8.3f}" for c in coords))

print("\nMulti-user: deadline-5 channel, 2 ALOHA users, growing TSRA agents")
rows = multi_user_sweep(ExperimentConfig(groups=4, slots=50_000, window=50_000,
                                         seed=5), shapes=((5, 2),), max_agents=3)
by_agents = {}
for d, n_aloha, n_agents, group, seed, thr in rows:
    by_agents.setdefault(n_agents, []).append(thr)
for n_agents, vals in sorted(by_agents.items()):
    print(f"   {n_agents} agent(s): mean system throughput "
          f"{sum(vals) / len(vals):.3f} over {len(vals)} groups")
