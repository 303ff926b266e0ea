"""Partitioning a batch of packets into feasible transmission sets.

A batch is a multiset of link ids (several packets may queue on one link).
A schedule is an ordered list of sets; each set must be feasible, contain a
link at most once, and the sets together must cover the batch exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .model import Instance
from .sinr import FEAS_RTOL, DeadLinkError, PowerAssignment, _tables, is_feasible

__all__ = [
    "PacketBatch",
    "Schedule",
    "Scheduler",
    "schedule_greedy",
    "validate_schedule",
    "schedule_length",
]

# link id -> packet count (all counts >= 1)
PacketBatch = Mapping[int, int]


@dataclass
class Schedule:
    """Ordered transmission sets, optionally tagged with the period that
    generated the batch."""

    sets: list[list[int]]
    period: int | None = None


Scheduler = Callable[[PacketBatch, PowerAssignment, Instance], Schedule]


def schedule_length(schedule: Schedule) -> int:
    return len(schedule.sets)


def _check_batch(batch: PacketBatch, inst: Instance) -> None:
    if not batch:
        raise ValueError("batch must be non-empty")
    for lid, count in batch.items():
        if not (0 <= lid < inst.n):
            raise ValueError(f"batch references unknown link id {lid}")
        if count < 1:
            raise ValueError(f"batch count for link {lid} must be >= 1, got {count}")


def schedule_greedy(batch: PacketBatch, pa: PowerAssignment, inst: Instance) -> Schedule:
    """First-fit decreasing: walk packets by decreasing link length (ties by
    link id, then packet index) and put each into the first existing set that
    stays feasible and does not yet hold that link; open a new set otherwise.

    Deterministic. Raises DeadLinkError if the batch holds a dead link
    (no set containing it could ever be feasible).
    """
    _check_batch(batch, inst)
    t = _tables(inst, pa)
    ids = sorted(batch, key=lambda lid: (-inst.links[lid].length, lid))
    dead = [lid for lid in ids if t.dead[lid]]
    if dead:
        raise DeadLinkError(dead)

    beta_t = inst.beta * (1.0 - FEAS_RTOL)
    noise = inst.noise
    gain = t.gain
    signal = t.signal

    sets: list[list[int]] = []
    interference: list[dict[int, float]] = []  # per set: member id -> incoming interference

    for lid in ids:
        for _ in range(batch[lid]):
            placed = False
            for members, interf in zip(sets, interference):
                if lid in interf:
                    continue
                new_in = 0.0
                ok = True
                for m in members:
                    if signal[m] < beta_t * (interf[m] + gain[lid, m] + noise):
                        ok = False
                        break
                    new_in += gain[m, lid]
                if ok and signal[lid] >= beta_t * (new_in + noise):
                    for m in members:
                        interf[m] += gain[lid, m]
                    members.append(lid)
                    interf[lid] = new_in
                    placed = True
                    break
            if not placed:
                sets.append([lid])
                interference.append({lid: 0.0})
    return Schedule(sets=sets)


def validate_schedule(schedule: Schedule, batch: PacketBatch, pa: PowerAssignment, inst: Instance) -> bool:
    """True iff every set is non-empty, duplicate-free and feasible, and the
    multiset union of the sets equals the batch exactly."""
    counts: dict[int, int] = {}
    for s in schedule.sets:
        if not s:
            return False
        if len(set(s)) != len(s):
            return False
        if not is_feasible(s, pa, inst):
            return False
        for lid in s:
            counts[lid] = counts.get(lid, 0) + 1
    return counts == {lid: c for lid, c in batch.items() if c != 0}
