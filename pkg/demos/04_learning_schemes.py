"""Train the four tabular schemes on the benchmark instance and compare.

FSQA is discounted Q-learning on the full own-queue state; FSRA, HSRA and
TSRA are average-reward R-learning on the full, head-of-line, and
urgent-bit state spaces. The offset-corrected FSQA variant (reward minus a
constant) recovers R-learning-grade performance.

Run: python demos/04_learning_schemes.py   (about a minute)
"""

from dcra import DEFAULT_PARAMS, ExperimentConfig, run_single
from dcra.mdp import lp_upper_bound

bound, _ = lp_upper_bound(DEFAULT_PARAMS)
print(f"Benchmark instance at D=2; LP upper bound {bound:.4f}\n")
print(f"{'scheme':>12} {'states':>6} {'slots':>9} {'throughput':>10} {'rho':>8}")

config = ExperimentConfig(slots=1_000_000, window=100_000)
for scheme in ("FSQA", "FSRA", "HSRA", "TSRA"):
    record = run_single(config, scheme, DEFAULT_PARAMS, seed=11)
    n_states = len(record.policy)
    print(f"{scheme:>12} {n_states:>6} {record.slots:>9} "
          f"{record.throughput:>10.4f} {record.rho:>8.4f}")

offset = ExperimentConfig(slots=1_000_000, window=100_000, reward_offset=0.3)
record = run_single(offset, "FSQA", DEFAULT_PARAMS, seed=11)
print(f"{'FSQA c=0.3':>12} {len(record.policy):>6} {record.slots:>9} "
      f"{record.throughput:>10.4f} {record.rho:>8.4f}")

print("\nLearned TSRA policy (8 states):")
record = run_single(config, "TSRA", DEFAULT_PARAMS, seed=11)
for label, action, q_wait, q_transmit, _ in record.policy:
    print(f"  {label:12s} -> {action:8s} (q_wait={q_wait:+.3f}, "
          f"q_transmit={q_transmit:+.3f})")
