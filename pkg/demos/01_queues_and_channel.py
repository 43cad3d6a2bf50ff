"""Walk through the building blocks: lead-time queues and the collision channel.

Run: python demos/01_queues_and_channel.py
"""

import numpy as np

from dcra import (Bernoulli, Feedback, Observation, PacketQueue, observation_for,
                  resolve_slot, sample_arrivals)

rng = np.random.default_rng(0)

print("= Lead-time queues =")
q = PacketQueue(3)
print(f"fresh queue (deadline 3):        {q.counts}")
q.enqueue_arrivals(1)
print(f"one arrival, enters at lead 3:   {q.counts}")
expired = q.advance()
print(f"one slot later (expired={expired}):       {q.counts}")
q.enqueue_arrivals(1)
print(f"second arrival:                  {q.counts}  HoL lead={q.hol_lead_time()}")
q.advance()
q.advance()
print(f"two more slots:                  {q.counts}  urgent={q.has_urgent()}")
expired = q.advance()
print(f"the survivor expires:            {q.counts}  (expired={expired})")

print("\n= Bernoulli vs Poisson traffic =")
bern = sum(sample_arrivals(Bernoulli(0.3), rng) for _ in range(100_000))
print(f"Bernoulli(0.3): {bern / 100_000:.4f} packets/slot (expect 0.3)")

print("\n= Unreliable collision channel =")
cases = [((0, 0), "nobody transmits"),
         ((1, 0), "user 0 alone (success prob 0.7)"),
         ((0, 1), "user 1 alone (success prob 0.6)"),
         ((1, 1), "both transmit")]
for flags, label in cases:
    tally = {Feedback.ACK: 0, Feedback.NACK: 0, Feedback.SILENCE: 0}
    for _ in range(20_000):
        out = resolve_slot(flags, (0.7, 0.6), rng)
        tally[out.feedback] += 1
    rates = {fb.name: f"{n / 20_000:.3f}" for fb, n in tally.items()}
    print(f"{label:34s} -> {rates}")

print("\n= What each user observes =")
out = resolve_slot((1, 0), (1.0, 1.0), rng)
print(f"user 0 transmitted and won the slot: user 0 sees "
      f"{observation_for(1, out).name}, user 1 sees {observation_for(0, out).name}")
