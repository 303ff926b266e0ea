"""Affectance calculus over link instances.

Affectance is the normalized interference one link inflicts on another,
capped at 1: a_src(dst) = min(1, c * (P_src / P_dst) * (len_dst / d)^alpha)
with d the sender(src)->receiver(dst) distance and c a noise-dependent
constant of the target link. A set of links is feasible when every member's
SINR clears the threshold beta with all others transmitting at once.

All derived tables (powers, gains, affectance matrix) are precomputed once
per (instance, power assignment) pair and cached.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

import numpy as np

from .model import Instance, Link

__all__ = [
    "FEAS_RTOL",
    "DeadLinkError",
    "PowerAssignment",
    "power",
    "affectance",
    "affectance_matrix",
    "affectance_sum",
    "is_feasible",
    "find_dead_links",
    "max_avg_affectance",
    "PowerClass",
    "classify_power",
]

# Multiplicative slack on the SINR threshold so exact-boundary sets
# (signal == beta * interference) count as feasible despite rounding.
FEAS_RTOL = 1e-12

_POWER_KINDS = ("uniform", "linear", "mean", "custom")


class DeadLinkError(ValueError):
    """A link cannot meet the SINR threshold even with zero interference."""

    def __init__(self, link_ids):
        self.link_ids = tuple(sorted(set(link_ids)))
        super().__init__(f"dead links (power too low for noise floor): {list(self.link_ids)}")


@dataclass(frozen=True)
class PowerAssignment:
    """Transmission power rule.

    kind is one of: uniform (fixed level), linear (length**alpha),
    mean (length**(alpha/2)), custom (explicit per-link table).
    """

    kind: str
    level: float = 1.0
    table: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in _POWER_KINDS:
            raise ValueError(f"unknown power kind {self.kind!r}, expected one of {_POWER_KINDS}")
        if self.kind == "uniform" and not (self.level > 0.0):
            raise ValueError(f"uniform power level must be positive, got {self.level}")
        if self.kind == "custom":
            if self.table is None or len(self.table) == 0:
                raise ValueError("custom power assignment needs a non-empty table")
            if any(not (p > 0.0) for p in self.table):
                raise ValueError("custom powers must all be positive")

    @classmethod
    def uniform(cls, level: float = 1.0) -> "PowerAssignment":
        return cls(kind="uniform", level=level)

    @classmethod
    def linear(cls) -> "PowerAssignment":
        return cls(kind="linear")

    @classmethod
    def mean(cls) -> "PowerAssignment":
        return cls(kind="mean")

    @classmethod
    def custom(cls, powers: Iterable[float]) -> "PowerAssignment":
        return cls(kind="custom", table=tuple(float(p) for p in powers))


def power(pa: PowerAssignment, link: Link, alpha: float) -> float:
    """Power the assignment gives one link."""
    if pa.kind == "uniform":
        return pa.level
    if pa.kind == "linear":
        return link.length**alpha
    if pa.kind == "mean":
        return link.length ** (alpha / 2.0)
    if link.id >= len(pa.table):
        raise ValueError(f"custom power table has {len(pa.table)} entries, no entry for link {link.id}")
    return pa.table[link.id]


class _Tables:
    """Per-(instance, assignment) physical tables, all indexed by link id.

    gain[src, dst] = P_src / d(sender_src, receiver_dst)^alpha; the diagonal
    is each link's own received signal. afm/ucm are the capped and uncapped
    affectance matrices, with NaN columns for dead links.
    """

    __slots__ = ("P", "signal", "gain", "dead", "afm", "ucm")

    def __init__(self, inst: Instance, pa: PowerAssignment):
        n = inst.n
        alpha = inst.alpha
        P = np.array([power(pa, link, alpha) for link in inst.links], dtype=np.float64)

        sx = np.array([l.sender.x for l in inst.links])
        sy = np.array([l.sender.y for l in inst.links])
        rx = np.array([l.receiver.x for l in inst.links])
        ry = np.array([l.receiver.y for l in inst.links])
        # d[src, dst]: sender of src to receiver of dst
        d = np.hypot(sx[:, None] - rx[None, :], sy[:, None] - ry[None, :])

        with np.errstate(divide="ignore"):
            gain = P[:, None] / d**alpha
        signal = np.diag(gain).copy()

        dead = signal <= inst.beta * inst.noise
        with np.errstate(divide="ignore", invalid="ignore"):
            cv = inst.beta / (1.0 - inst.beta * inst.noise / signal)
            ucm = cv[None, :] * gain / signal[None, :]
            afm = np.minimum(1.0, ucm)
        ucm[:, dead] = np.nan
        afm[:, dead] = np.nan
        np.fill_diagonal(ucm, 0.0)
        np.fill_diagonal(afm, 0.0)

        self.P = P
        self.signal = signal
        self.gain = gain
        self.dead = dead
        self.afm = afm
        self.ucm = ucm
        for arr in (self.P, self.signal, self.gain, self.dead, self.afm, self.ucm):
            arr.setflags(write=False)


@lru_cache(maxsize=32)
def _tables(inst: Instance, pa: PowerAssignment) -> _Tables:
    return _Tables(inst, pa)


def _ids(links) -> list[int]:
    return [l.id if isinstance(l, Link) else int(l) for l in links]


def affectance(src: Link, dst: Link, pa: PowerAssignment, inst: Instance) -> float:
    """Capped affectance of src onto dst. Zero when src is dst.

    Raises DeadLinkError when dst cannot tolerate even zero interference.
    """
    t = _tables(inst, pa)
    if t.dead[dst.id]:
        raise DeadLinkError([dst.id])
    if src.id == dst.id:
        return 0.0
    return float(t.afm[src.id, dst.id])


def affectance_matrix(inst: Instance, pa: PowerAssignment) -> np.ndarray:
    """n x n capped affectance matrix (read-only); entry [src, dst].

    Raises DeadLinkError if any link is dead, since its column is undefined.
    """
    t = _tables(inst, pa)
    if t.dead.any():
        raise DeadLinkError(np.nonzero(t.dead)[0].tolist())
    return t.afm


def affectance_sum(S: Iterable, link, pa: PowerAssignment, inst: Instance, capped: bool = True) -> float:
    """Total affectance of the links in S onto one target link.

    capped=True applies the per-pair cap at 1 (the form used by the
    diagnostics); capped=False keeps raw values, making "sum <= 1" exactly
    the SINR feasibility inequality for the target.
    """
    t = _tables(inst, pa)
    dst = link.id if isinstance(link, Link) else int(link)
    if t.dead[dst]:
        raise DeadLinkError([dst])
    idx = _ids(S)
    mat = t.afm if capped else t.ucm
    return float(mat[idx, dst].sum())


def is_feasible(S: Iterable, pa: PowerAssignment, inst: Instance) -> bool:
    """Can every link in S clear the SINR threshold with all of S transmitting?

    Evaluated directly from signal and interference powers:
    signal >= beta * (interference + noise), with FEAS_RTOL slack on beta.
    Any dead link in S makes it infeasible. S must be non-empty.
    """
    idx = sorted(set(_ids(S)))
    if not idx:
        raise ValueError("feasibility is defined for non-empty sets")
    t = _tables(inst, pa)
    if t.dead[idx].any():
        return False
    sub = t.gain[np.ix_(idx, idx)]
    interference = sub.sum(axis=0) - np.diag(sub)
    lhs = t.signal[idx]
    rhs = inst.beta * (1.0 - FEAS_RTOL) * (interference + inst.noise)
    return bool(np.all(lhs >= rhs))


def find_dead_links(inst: Instance, pa: PowerAssignment) -> list[int]:
    """Ids of links whose signal cannot clear beta * noise alone."""
    return np.nonzero(_tables(inst, pa).dead)[0].tolist()


_EXACT_LIMIT = 20


def max_avg_affectance(R: Iterable, pa: PowerAssignment, inst: Instance, mode: str = "greedy") -> float:
    """Largest average total affectance over any non-empty subset Q of R:
    max_Q (1/|Q|) * sum over ordered pairs in Q of affectance.

    mode="exact" enumerates all subsets (|R| <= 20 enforced); mode="greedy"
    peels the link of least incident weight and is within a factor 2 below
    the exact optimum.
    """
    idx = sorted(set(_ids(R)))
    if not idx:
        raise ValueError("R must be non-empty")
    if mode not in ("greedy", "exact"):
        raise ValueError(f"mode must be 'greedy' or 'exact', got {mode!r}")
    t = _tables(inst, pa)
    if t.dead[idx].any():
        raise DeadLinkError(np.asarray(idx)[t.dead[idx]].tolist())
    A = t.afm[np.ix_(idx, idx)]
    m = len(idx)
    if m == 1:
        return 0.0

    if mode == "exact":
        if m > _EXACT_LIMIT:
            raise ValueError(f"exact mode supports at most {_EXACT_LIMIT} links, got {m}")
        best = 0.0
        shifts = np.arange(m, dtype=np.uint32)
        chunk = 1 << 16
        for lo in range(1, 1 << m, chunk):
            masks = np.arange(lo, min(lo + chunk, 1 << m), dtype=np.uint32)
            bits = ((masks[:, None] >> shifts[None, :]) & 1).astype(np.float64)
            totals = ((bits @ A) * bits).sum(axis=1)
            sizes = bits.sum(axis=1)
            best = max(best, float((totals / sizes).max()))
        return best

    # Greedy peeling: drop the link with the least incident (in+out) weight,
    # tracking the best average seen along the way.
    W = A + A.T
    alive = np.ones(m, dtype=bool)
    deg = W.sum(axis=1)
    size = m
    best = 0.0
    while size >= 1:
        avg = float(deg[alive].sum() / 2.0 / size)
        best = max(best, avg)
        if size == 1:
            break
        cand = np.nonzero(alive)[0]
        drop = cand[np.argmin(deg[cand])]
        alive[drop] = False
        deg -= W[:, drop]
        size -= 1
    return best


class PowerClass(NamedTuple):
    length_monotone: bool
    sublinear: bool


def classify_power(pa: PowerAssignment, inst: Instance) -> PowerClass:
    """Check the two standard structural properties over this instance's links:

    length-monotone: longer links never get less power;
    sublinear: longer links never get more received signal (power / len^alpha).
    """
    t = _tables(inst, pa)
    L = inst.lengths()
    P = t.P
    S = t.signal
    tol_p = 1e-12 * max(1.0, float(np.abs(P).max()))
    tol_s = 1e-12 * max(1.0, float(np.abs(S).max()))
    ge = L[:, None] >= L[None, :]
    length_monotone = bool(np.all(P[:, None] - P[None, :] >= -tol_p, where=ge))
    sublinear = bool(np.all(S[None, :] - S[:, None] >= -tol_s, where=ge))
    return PowerClass(length_monotone=length_monotone, sublinear=sublinear)
