"""The slotted-time engine.

Centralized mode: arrivals are batched per period of theta slots; a pluggable
scheduler partitions each batch into feasible sets, which join a FIFO queue
of sets; one set transmits per slot.

Distributed mode: physical slots come in data/signaling pairs. Each sender
runs an independent exponential-backoff loop on its oldest packet, gated so
only packets stamped with the period currently being served (counter s)
compete; a silent signaling slot tells everyone period s is drained. An SINR
arbiter adjudicates every data slot from the actual transmitter set.

Both modes emit a Trace with identical slot/period schemas.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from . import _kernel
from ._kernel_py import IDX_AC, IDX_AR, IDX_CUR, IDX_DE, IDX_S, IDX_TQ, IDX_TX
from .arrivals import RateVector
from .model import Instance
from .rng import STREAM_ARRIVALS, STREAM_PROTOCOL, stream_rng
from .scheduling import Scheduler, schedule_greedy, validate_schedule
from .sinr import FEAS_RTOL, DeadLinkError, PowerAssignment, _tables, find_dead_links

__all__ = [
    "KERNEL_BACKEND",
    "InvariantViolation",
    "SimConfig",
    "default_theta",
    "Trace",
    "StabilityResult",
    "estimate_stability",
    "run_centralized",
    "run_distributed",
    "diagnostic_out_affectance",
]

KERNEL_BACKEND = _kernel.BACKEND

_CHUNK = 4096  # slots of pregenerated randomness per kernel call

TRACE_HEADER = "slot,max_queue,total_queue,delivered_cum,arrived_cum,setqueue_or_s,cur"
PERIOD_HEADER = "period,batch_size,schedule_len"


class InvariantViolation(RuntimeError):
    """A runtime self-check failed mid-simulation."""


def default_theta(n: int, c: float = 1.0) -> int:
    """Default period length: ceil(c * log2(n)^2), at least 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (c > 0.0):
        raise ValueError("theta coefficient must be positive")
    return max(1, math.ceil(c * math.log2(n) ** 2))


@dataclass(frozen=True)
class SimConfig:
    mode: str
    total_slots: int
    theta: int
    gamma: float
    seed: int
    power: str = "mean"
    sense: str = "perfect"

    def __post_init__(self):
        if self.mode not in ("centralized", "distributed"):
            raise ValueError(f"mode must be centralized or distributed, got {self.mode!r}")
        if self.theta < 1:
            raise ValueError(f"theta must be >= 1, got {self.theta}")
        if self.total_slots < self.theta:
            raise ValueError(f"total_slots must be >= theta, got {self.total_slots} < {self.theta}")
        if not (0.0 <= self.gamma <= 1.0):
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.sense != "perfect":
            raise ValueError(f"only sense='perfect' is implemented, got {self.sense!r}")


@dataclass
class Trace:
    """Per-slot and per-period metrics of one run.

    Slot arrays are indexed 0..total_slots-1 for slots 1..total_slots.
    periods has one row per started period: (period, batch_size,
    schedule_len); schedule_len is the number of sets the scheduler produced
    (centralized) or the number of data slots the period was in service with
    at least one active sender (distributed). aplus[q-1, l] is the realized
    outgoing affectance from l to same-or-longer links over period q's
    arrivals.
    """

    mode: str
    theta: int
    n: int
    seed: int
    gamma: float
    max_queue: np.ndarray
    total_queue: np.ndarray
    delivered: np.ndarray
    arrived: np.ndarray
    setqueue_or_s: np.ndarray
    cur: np.ndarray
    periods: np.ndarray
    aplus: np.ndarray
    transmissions: int = 0

    @property
    def total_slots(self) -> int:
        return len(self.max_queue)

    @property
    def delivered_cum(self) -> np.ndarray:
        return np.cumsum(self.delivered)

    @property
    def arrived_cum(self) -> np.ndarray:
        return np.cumsum(self.arrived)

    def conservation_ok(self) -> bool:
        """Exact integer identity at every slot: arrived = delivered + queued."""
        return bool(np.all(self.arrived_cum == self.delivered_cum + self.total_queue))

    def delivered_fraction(self) -> float:
        arrived = int(self.arrived.sum())
        if arrived == 0:
            return 1.0
        return float(self.delivered.sum() / arrived)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trace):
            return NotImplemented
        scalars = ("mode", "theta", "n", "seed", "gamma", "transmissions")
        arrays = (
            "max_queue",
            "total_queue",
            "delivered",
            "arrived",
            "setqueue_or_s",
            "cur",
            "periods",
            "aplus",
        )
        return all(getattr(self, f) == getattr(other, f) for f in scalars) and all(
            np.array_equal(getattr(self, f), getattr(other, f)) for f in arrays
        )

    def _csv_rows(self, stride: int):
        if stride < 1:
            raise ValueError("stride must be >= 1")
        total = self.total_slots
        for t in range(stride, total + 1, stride):
            yield t
        if total % stride != 0:
            yield total

    def to_csv(self, path, stride: int = 1) -> None:
        dc = self.delivered_cum
        ac = self.arrived_cum
        with open(path, "w", encoding="ascii") as fh:
            fh.write(TRACE_HEADER + "\n")
            for t in self._csv_rows(stride):
                i = t - 1
                fh.write(
                    f"{t},{self.max_queue[i]},{self.total_queue[i]},{dc[i]},{ac[i]},"
                    f"{self.setqueue_or_s[i]},{self.cur[i]}\n"
                )

    def periods_to_csv(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(PERIOD_HEADER + "\n")
            for q, batch, slen in self.periods:
                fh.write(f"{q},{batch},{slen}\n")


@dataclass(frozen=True)
class StabilityResult:
    stable: bool
    slope: float  # max-queue growth per 1000 slots over the last half


# A run counts as stable when the fitted growth across the whole second half
# stays below this fraction of the prevailing queue level.
STABILITY_REL_THRESHOLD = 0.1


def estimate_stability(trace: Trace) -> StabilityResult:
    """Least-squares trend of max_queue over the last half of the run.

    Returns the raw slope scaled to packets per 1000 slots, and a verdict
    that compares the projected growth over the window against the mean
    queue level, so the call is invariant to how long the run was.
    """
    total = trace.total_slots
    if total < 10000:
        raise ValueError(f"stability estimate needs >= 10000 slots, got {total}")
    y = trace.max_queue[total // 2 :].astype(np.float64)
    w = len(y)
    x = np.arange(w, dtype=np.float64)
    x -= x.mean()
    denom = float(x @ x)
    slope_per_slot = float(x @ y) / denom
    mean_y = float(y.mean())
    stable = slope_per_slot * w <= STABILITY_REL_THRESHOLD * max(mean_y, 1.0)
    return StabilityResult(stable=bool(stable), slope=slope_per_slot * 1000.0)


@lru_cache(maxsize=32)
def _outgoing_matrix(inst: Instance, pa: PowerAssignment) -> np.ndarray:
    """O[l, l'] = affectance of l onto l' if l' is same-or-longer than l
    (ordering by (length, id)), else 0."""
    t = _tables(inst, pa)
    if t.dead.any():
        raise DeadLinkError(np.nonzero(t.dead)[0].tolist())
    L = inst.lengths()
    ids = np.arange(inst.n)
    geq = (L[None, :] > L[:, None]) | ((L[None, :] == L[:, None]) & (ids[None, :] >= ids[:, None]))
    out = np.where(geq, t.afm, 0.0)
    np.fill_diagonal(out, 0.0)
    out.setflags(write=False)
    return out


def diagnostic_out_affectance(
    inst: Instance,
    pa: PowerAssignment,
    rv: RateVector | None,
    period_sample: np.ndarray,
) -> np.ndarray:
    """Realized outgoing affectance per link over one period's arrivals.

    period_sample is a (slots, n) or (n,) array of arrival counts; the
    per-slot contributions sum linearly, so only column totals matter. The
    rate vector is accepted for signature symmetry and only shape-checked.
    """
    sample = np.asarray(period_sample)
    if sample.ndim == 2:
        counts = sample.sum(axis=0)
    elif sample.ndim == 1:
        counts = sample
    else:
        raise ValueError("period_sample must be 1- or 2-dimensional")
    if counts.shape[0] != inst.n:
        raise ValueError(f"period_sample covers {counts.shape[0]} links, instance has {inst.n}")
    if rv is not None and rv.n != inst.n:
        raise ValueError(f"rate vector covers {rv.n} links, instance has {inst.n}")
    return _outgoing_matrix(inst, pa) @ counts.astype(np.float64)


def _require_alive(inst: Instance, pa: PowerAssignment) -> None:
    dead = find_dead_links(inst, pa)
    if dead:
        raise DeadLinkError(dead)


def _periods_table(max_period: int, arr_count: np.ndarray, schedule_len: np.ndarray) -> np.ndarray:
    rows = np.zeros((max_period, 3), dtype=np.int64)
    rows[:, 0] = np.arange(1, max_period + 1)
    rows[:, 1] = arr_count[:, 1 : max_period + 1].sum(axis=0)
    rows[:, 2] = schedule_len[1 : max_period + 1]
    return rows


def _aplus_table(inst: Instance, pa: PowerAssignment, arr_count: np.ndarray, max_period: int) -> np.ndarray:
    O = _outgoing_matrix(inst, pa)
    counts = arr_count[:, 1 : max_period + 1].astype(np.float64)
    return (O @ counts).T  # (periods, n)


def run_centralized(
    inst: Instance,
    pa: PowerAssignment,
    rv: RateVector,
    cfg: SimConfig,
    scheduler: Scheduler = schedule_greedy,
) -> Trace:
    """Period-batched scheduling: every theta slots the previous period's
    arrivals are partitioned into feasible sets and appended to a FIFO queue
    of sets; the front set transmits (and fully delivers) each slot.

    Every schedule the pluggable scheduler returns is validated before its
    sets join the queue; a bad schedule raises InvariantViolation.
    """
    if cfg.mode != "centralized":
        raise ValueError(f"cfg.mode must be centralized, got {cfg.mode!r}")
    if rv.n != inst.n:
        raise ValueError(f"rate vector covers {rv.n} links, instance has {inst.n}")
    _require_alive(inst, pa)

    n = inst.n
    theta = cfg.theta
    total = cfg.total_slots
    lam = rv.lam
    max_period = (total - 1) // theta + 1

    rng = stream_rng(cfg.seed, STREAM_ARRIVALS)
    qlen = np.zeros(n, dtype=np.int64)
    inset = np.zeros(n, dtype=np.int64)  # sets in queue containing each link
    arr_count = np.zeros((n, max_period + 2), dtype=np.int64)
    sched_len = np.zeros(max_period + 2, dtype=np.int64)
    setqueue: deque[list[int]] = deque()

    tr_max = np.zeros(total, dtype=np.int64)
    tr_total = np.zeros(total, dtype=np.int64)
    tr_deliv = np.zeros(total, dtype=np.int64)
    tr_arr = np.zeros(total, dtype=np.int64)
    tr_sq = np.zeros(total, dtype=np.int64)
    tr_cur = np.zeros(total, dtype=np.int64)

    total_queue = 0
    u = None
    for t in range(1, total + 1):
        i = t - 1
        if i % _CHUNK == 0:
            u = rng.random((min(_CHUNK, total - i), n))
        period = (t - 1) // theta + 1
        delivered_now = 0

        if setqueue:
            front = setqueue.popleft()
            delivered_now = len(front)
            for lid in front:
                qlen[lid] -= 1
                inset[lid] -= 1
            total_queue -= delivered_now

        if (t - 1) % theta == 0 and period >= 2:
            batch = {lid: int(c) for lid, c in enumerate(arr_count[:, period - 1]) if c}
            if batch:
                schedule = scheduler(batch, pa, inst)
                if not validate_schedule(schedule, batch, pa, inst):
                    raise InvariantViolation(
                        f"scheduler returned an invalid schedule for period {period - 1}"
                    )
                sched_len[period - 1] = len(schedule.sets)
                for members in schedule.sets:
                    setqueue.append(list(members))
                    for lid in members:
                        inset[lid] += 1
                if inset.max() > len(setqueue):
                    raise InvariantViolation("a link appears in more sets than the queue holds")

        row = u[i % _CHUNK]
        arrived_now = 0
        for lid in np.nonzero(row < lam)[0]:
            qlen[lid] += 1
            arr_count[lid, period] += 1
            arrived_now += 1
        total_queue += arrived_now

        tr_max[i] = qlen.max()
        tr_total[i] = total_queue
        tr_deliv[i] = delivered_now
        tr_arr[i] = arrived_now
        tr_sq[i] = len(setqueue)
        tr_cur[i] = period

    return Trace(
        mode="centralized",
        theta=theta,
        n=n,
        seed=cfg.seed,
        gamma=cfg.gamma,
        max_queue=tr_max,
        total_queue=tr_total,
        delivered=tr_deliv,
        arrived=tr_arr,
        setqueue_or_s=tr_sq,
        cur=tr_cur,
        periods=_periods_table(max_period, arr_count, sched_len),
        aplus=_aplus_table(inst, pa, arr_count, max_period),
    )


def run_distributed(
    inst: Instance,
    pa: PowerAssignment,
    rv: RateVector,
    cfg: SimConfig,
    initial_packets: Mapping[int, int] | None = None,
    arrive_each_slot: bool = False,
) -> Trace:
    """Distributed backoff protocol over data/signaling slot pairs.

    initial_packets preloads packets stamped with period 1 (useful for
    isolated-delivery experiments). Arrival rates are per scheduling
    opportunity: by default each slot pair gets one Bernoulli draw (landing
    on its data slot), so a rate vector means the same thing here as in
    centralized mode; arrive_each_slot=True doubles the opportunities by
    drawing on signaling slots too. Identical randomness is consumed either
    way, so flipping the flag never perturbs other draws.
    """
    if cfg.mode != "distributed":
        raise ValueError(f"cfg.mode must be distributed, got {cfg.mode!r}")
    if rv.n != inst.n:
        raise ValueError(f"rate vector covers {rv.n} links, instance has {inst.n}")
    _require_alive(inst, pa)

    n = inst.n
    theta = cfg.theta
    total = cfg.total_slots
    t = _tables(inst, pa)

    max_period = ((total - 1) >> 1) // theta + 1
    P2 = max_period + 2
    phase_base = 8.0 * math.log(n) if n > 1 else 8.0 * math.log(2)
    phase0 = int(np.ceil(phase_base / 0.25))

    qcount = np.zeros((n, P2), dtype=np.int64)
    arr_count = np.zeros((n, P2), dtype=np.int64)
    qlen = np.zeros(n, dtype=np.int64)
    headg = np.zeros(n, dtype=np.int64)
    active = np.zeros(n, dtype=np.uint8)
    k = np.zeros(n, dtype=np.int64)
    prob = np.zeros(n, dtype=np.float64)
    left = np.zeros(n, dtype=np.int64)
    scal = np.zeros(8, dtype=np.int64)
    arrived_by_g = np.zeros(P2, dtype=np.int64)
    delivered_by_g = np.zeros(P2, dtype=np.int64)
    serve_slots = np.zeros(P2, dtype=np.int64)
    sattime = np.full(P2, -1, dtype=np.int64)

    scal[IDX_S] = 1
    scal[IDX_CUR] = 1
    sattime[1] = 0

    if initial_packets:
        for lid, count in initial_packets.items():
            if not (0 <= lid < n):
                raise ValueError(f"initial packet on unknown link id {lid}")
            if count < 1:
                raise ValueError(f"initial packet count for link {lid} must be >= 1")
            qcount[lid, 1] += count
            arr_count[lid, 1] += count
            qlen[lid] += count
            headg[lid] = 1
            active[lid] = 1
            k[lid] = 0
            prob[lid] = 0.25
            left[lid] = phase0
        scal[IDX_AC] = int(active.sum())
        preloaded = int(qlen.sum())
        scal[IDX_TQ] = preloaded
        scal[IDX_AR] = preloaded
        arrived_by_g[1] = preloaded
    else:
        preloaded = 0

    tr_max = np.zeros(total, dtype=np.int64)
    tr_total = np.zeros(total, dtype=np.int64)
    tr_deliv = np.zeros(total, dtype=np.int64)
    tr_arr = np.zeros(total, dtype=np.int64)
    tr_s = np.zeros(total, dtype=np.int64)
    tr_cur = np.zeros(total, dtype=np.int64)

    rng_arr = stream_rng(cfg.seed, STREAM_ARRIVALS)
    rng_coin = stream_rng(cfg.seed, STREAM_PROTOCOL)
    beta_t = inst.beta * (1.0 - FEAS_RTOL)

    gain = np.ascontiguousarray(t.gain)
    signal = np.ascontiguousarray(t.signal)
    lam = np.ascontiguousarray(rv.lam)

    for t0 in range(0, total, _CHUNK):
        m = min(_CHUNK, total - t0)
        u_arr = rng_arr.random((m, n))
        u_coin = rng_coin.random((m, n))
        _kernel.run_distributed_chunk(
            t0,
            m,
            theta,
            phase_base,
            phase0,
            beta_t,
            inst.noise,
            1 if arrive_each_slot else 0,
            lam,
            gain,
            signal,
            u_arr,
            u_coin,
            qcount,
            arr_count,
            qlen,
            headg,
            active,
            k,
            prob,
            left,
            scal,
            arrived_by_g,
            delivered_by_g,
            serve_slots,
            sattime,
            tr_max[t0 : t0 + m],
            tr_total[t0 : t0 + m],
            tr_deliv[t0 : t0 + m],
            tr_arr[t0 : t0 + m],
            tr_s[t0 : t0 + m],
            tr_cur[t0 : t0 + m],
        )

    # preloaded packets count as slot-1 arrivals so conservation stays exact
    tr_arr[0] += preloaded
    if int(scal[IDX_AR]) != int(tr_arr.sum()) or int(scal[IDX_DE]) != int(tr_deliv.sum()):
        raise InvariantViolation("kernel counters disagree with the trace")

    final_cur = int(scal[IDX_CUR])
    return Trace(
        mode="distributed",
        theta=theta,
        n=n,
        seed=cfg.seed,
        gamma=cfg.gamma,
        max_queue=tr_max,
        total_queue=tr_total,
        delivered=tr_deliv,
        arrived=tr_arr,
        setqueue_or_s=tr_s,
        cur=tr_cur,
        periods=_periods_table(final_cur, arr_count, serve_slots),
        aplus=_aplus_table(inst, pa, arr_count, final_cur),
        transmissions=int(scal[IDX_TX]),
    )
