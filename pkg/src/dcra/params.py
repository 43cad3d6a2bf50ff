"""System parameters and per-user traffic models."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Bernoulli:
    """At most one packet per slot, arriving with probability p."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"Bernoulli probability must be in [0,1], got {self.p}")


@dataclass(frozen=True)
class Poisson:
    """Poisson-distributed batch of packets per slot with rate lam."""

    lam: float

    def __post_init__(self):
        if self.lam < 0.0:
            raise ValueError(f"Poisson rate must be nonnegative, got {self.lam}")


TrafficModel = Bernoulli | Poisson


@dataclass(frozen=True)
class SystemParams:
    """Parameters of the two-user collision channel.

    User 1 runs slotted ALOHA with transmit probability p_t; user 2 is the
    controlled user. p_s / p_s_prime are the solo-transmission success
    probabilities (simultaneous transmissions always collide). Deadlines d1
    and d2 are per-user packet lifetimes in slots. lam is the Poisson rate
    for user 1 when its traffic is Poisson instead of Bernoulli(p_b).
    """

    p_b: float
    p_b_prime: float
    p_s: float
    p_s_prime: float
    p_t: float
    d1: int = 1
    d2: int = 1
    lam: float = field(default=0.0)

    def __post_init__(self):
        for name in ("p_b", "p_b_prime", "p_s", "p_s_prime", "p_t"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {v}")
        if self.d1 < 1 or self.d2 < 1:
            raise ValueError(f"deadlines must be >= 1, got d1={self.d1}, d2={self.d2}")
        if self.lam < 0.0:
            raise ValueError(f"lam must be nonnegative, got {self.lam}")

    @property
    def d(self) -> int:
        """Common deadline; only defined when both users share one."""
        if self.d1 != self.d2:
            raise ValueError(f"no common deadline: d1={self.d1}, d2={self.d2}")
        return self.d1

    def with_deadline(self, d: int) -> "SystemParams":
        return SystemParams(self.p_b, self.p_b_prime, self.p_s, self.p_s_prime,
                            self.p_t, d1=d, d2=d, lam=self.lam)


# Benchmark instance used throughout the docs, demos and tests.
DEFAULT_PARAMS = SystemParams(p_b=0.5, p_b_prime=0.4, p_s=0.7, p_s_prime=0.6,
                              p_t=0.4, d1=2, d2=2)


def sample_arrivals(model: TrafficModel, rng) -> int:
    """Number of packets arriving in one slot under the given traffic model.

    rng needs .random() for Bernoulli and .poisson(lam) for Poisson.
    """
    if isinstance(model, Bernoulli):
        return 1 if rng.random() < model.p else 0
    return int(rng.poisson(model.lam))
