"""Convergence speed: TSRA's tiny table adapts orders of magnitude faster.

Prints trailing-window throughput at a few checkpoints for FSRA vs FSQA at
D=5 (the full-state Q-learner stalls) and for TSRA at large deadlines
(converged within a few thousand slots).

Run: python demos/05_convergence.py   (about a minute)
"""

from dcra import DEFAULT_PARAMS, ExperimentConfig
from dcra.harness import convergence_trace

CHECKPOINTS = (10_000, 50_000, 200_000, 1_000_000)


def show(label, series):
    at = dict(series)
    cells = "  ".join(f"{slot // 1000:>5}k:{at[slot]:.3f}" for slot in CHECKPOINTS)
    print(f"{label:>10s}  {cells}")


config = ExperimentConfig(slots=1_000_000, window=100_000,
                          trace_interval=1_000, trace_window=10_000)

print("D=5, benchmark parameters (trailing 10k-slot throughput):")
for scheme in ("FSRA", "FSQA"):
    show(scheme, convergence_trace(config, scheme, DEFAULT_PARAMS.with_deadline(5), seed=3))

print("\nTSRA at large deadlines (same parameters):")
for d in (10, 20, 30):
    show(f"TSRA D={d}", convergence_trace(config, "TSRA",
                                          DEFAULT_PARAMS.with_deadline(d), seed=3))

print("\nTSRA's 8-state table is already converged by ~6k slots; the")
print("full-state spaces grow as 2^(D+2) and need correspondingly longer.")
