"""Stochastic packet arrivals.

A rate vector assigns each link a Bernoulli arrival probability per slot,
backed by a decomposition into feasible sets M_i with weights m_i: the rate
of link l is the total weight of the sets containing it, and the weights sum
to the load factor gamma. Admissible traffic is exactly the traffic that can
be written this way.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .model import Instance
from .scheduling import Scheduler, schedule_greedy
from .sinr import PowerAssignment, is_feasible

__all__ = [
    "RATE_ATOL",
    "RateVector",
    "build_rate_vector",
    "zero_rate_vector",
    "validate_rate_vector",
    "sample",
    "rate_vector_to_text",
    "parse_rate_vector",
]

RATE_ATOL = 1e-12


def _rates_from(n: int, sets, weights) -> tuple[float, ...]:
    lam = [0.0] * n
    for members, w in zip(sets, weights):
        for lid in members:
            lam[lid] += w
    return tuple(lam)


@dataclass(frozen=True)
class RateVector:
    """Per-link arrival probabilities with their feasible-set decomposition."""

    rates: tuple[float, ...]
    sets: tuple[tuple[int, ...], ...]
    weights: tuple[float, ...]
    gamma: float

    @cached_property
    def lam(self) -> np.ndarray:
        arr = np.array(self.rates, dtype=np.float64)
        arr.setflags(write=False)
        return arr

    @property
    def n(self) -> int:
        return len(self.rates)


def validate_rate_vector(rv: RateVector, pa: PowerAssignment, inst: Instance) -> None:
    """Raise ValueError unless rv is internally consistent and every
    decomposition set is feasible on this instance."""
    if rv.n != inst.n:
        raise ValueError(f"rate vector covers {rv.n} links, instance has {inst.n}")
    if len(rv.sets) != len(rv.weights):
        raise ValueError("decomposition sets and weights differ in length")
    if abs(sum(rv.weights) - rv.gamma) > RATE_ATOL:
        raise ValueError(f"weights sum to {sum(rv.weights)!r}, expected gamma={rv.gamma!r}")
    expected = _rates_from(inst.n, rv.sets, rv.weights)
    for lid, (have, want) in enumerate(zip(rv.rates, expected)):
        if abs(have - want) > RATE_ATOL:
            raise ValueError(f"rate of link {lid} is {have!r}, decomposition gives {want!r}")
        if not (0.0 <= have <= 1.0):
            raise ValueError(f"rate of link {lid} out of [0,1]: {have!r}")
    for i, (members, w) in enumerate(zip(rv.sets, rv.weights)):
        if not members:
            raise ValueError(f"decomposition set {i} is empty")
        if w <= 0.0:
            raise ValueError(f"weight of set {i} must be positive, got {w!r}")
        if not is_feasible(members, pa, inst):
            raise ValueError(f"decomposition set {i} is not feasible")


def build_rate_vector(
    inst: Instance,
    pa: PowerAssignment,
    gamma: float,
    scheduler: Scheduler = schedule_greedy,
) -> RateVector:
    """Admissible traffic at load factor gamma: partition all links into
    feasible sets with the given scheduler (one packet per link), then give
    each of the T sets weight gamma/T. Every link lands in exactly one set,
    so every rate is gamma/T."""
    if not (0.0 < gamma <= 1.0):
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    schedule = scheduler({lid: 1 for lid in range(inst.n)}, pa, inst)
    sets = tuple(tuple(sorted(s)) for s in schedule.sets)
    T = len(sets)
    weights = tuple(gamma / T for _ in range(T))
    return RateVector(
        rates=_rates_from(inst.n, sets, weights),
        sets=sets,
        weights=weights,
        gamma=gamma,
    )


def zero_rate_vector(inst: Instance) -> RateVector:
    """Degenerate rate vector with no traffic (gamma = 0, empty decomposition)."""
    return RateVector(rates=(0.0,) * inst.n, sets=(), weights=(), gamma=0.0)


def sample(rv: RateVector, slot: int, rng: np.random.Generator) -> np.ndarray:
    """One slot of independent Bernoulli arrivals (0/1 per link). The slot
    index is informational; randomness comes from the generator state."""
    return (rng.random(rv.n) < rv.lam).astype(np.int8)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def rate_vector_to_text(rv: RateVector) -> str:
    """Serialize: header "gamma T", then one "m_i: id id ..." line per set."""
    lines = [f"{_fmt(rv.gamma)} {len(rv.sets)}"]
    for members, w in zip(rv.sets, rv.weights):
        lines.append(f"{_fmt(w)}: " + " ".join(str(lid) for lid in members))
    return "\n".join(lines) + "\n"


def parse_rate_vector(text: str, n: int) -> RateVector:
    """Inverse of rate_vector_to_text for an n-link instance."""
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        raise ValueError("empty rate vector text")
    head = rows[0].split()
    if len(head) != 2:
        raise ValueError(f"header must be 'gamma T', got {rows[0]!r}")
    gamma = float(head[0])
    T = int(head[1])
    if len(rows) - 1 != T:
        raise ValueError(f"header declares {T} sets but {len(rows) - 1} lines follow")
    sets = []
    weights = []
    for row in rows[1:]:
        left, _, right = row.partition(":")
        if not _:
            raise ValueError(f"set line must be 'weight: id id ...', got {row!r}")
        weights.append(float(left))
        members = tuple(int(v) for v in right.split())
        if any(not (0 <= lid < n) for lid in members):
            raise ValueError(f"set line references a link outside 0..{n - 1}: {row!r}")
        sets.append(members)
    return RateVector(
        rates=_rates_from(n, sets, weights),
        sets=tuple(sets),
        weights=tuple(weights),
        gamma=gamma,
    )
