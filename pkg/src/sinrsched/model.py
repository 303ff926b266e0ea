"""Problem instances: links in the plane plus the physical-model parameters.

A link is a sender/receiver pair. An instance bundles the links with the
path-loss exponent alpha, the SINR threshold beta, and the ambient noise
level. Instances are immutable and hashable so derived tables can be cached
against them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import STREAM_INSTANCE, stream_rng

__all__ = [
    "Point",
    "Link",
    "Instance",
    "distance",
    "length_diversity",
    "generate_instance",
    "instance_to_text",
    "parse_instance",
    "save_instance",
    "load_instance",
]


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")


def distance(p: Point, q: Point) -> float:
    """Euclidean distance."""
    return math.hypot(p.x - q.x, p.y - q.y)


@dataclass(frozen=True)
class Link:
    """Directed sender->receiver pair. Length must be positive."""

    id: int
    sender: Point
    receiver: Point

    def __post_init__(self):
        if self.length <= 0.0:
            raise ValueError(f"link {self.id}: sender and receiver must be distinct points")

    @property
    def length(self) -> float:
        return distance(self.sender, self.receiver)


@dataclass(frozen=True)
class Instance:
    """A set of links with the physical-model parameters.

    Link ids must be exactly 0..n-1 (list position = id), so arrays indexed
    by id line up with the link tuple.
    """

    links: tuple[Link, ...]
    alpha: float
    beta: float
    noise: float

    def __post_init__(self):
        if len(self.links) == 0:
            raise ValueError("instance must contain at least one link")
        if not isinstance(self.links, tuple):
            object.__setattr__(self, "links", tuple(self.links))
        for pos, link in enumerate(self.links):
            if link.id != pos:
                raise ValueError(f"link ids must be 0..n-1 in order; position {pos} has id {link.id}")
        if not (self.alpha > 0.0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (self.beta >= 1.0):
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if not (self.noise >= 0.0):
            raise ValueError(f"noise must be >= 0, got {self.noise}")

    @property
    def n(self) -> int:
        return len(self.links)

    def lengths(self) -> np.ndarray:
        return np.array([link.length for link in self.links], dtype=np.float64)


def length_diversity(inst: Instance) -> float:
    """Ratio of the longest link length to the shortest."""
    lengths = inst.lengths()
    return float(lengths.max() / lengths.min())


def generate_instance(
    n: int,
    l_min: float,
    l_max: float,
    side: float,
    seed: int,
    *,
    alpha: float = 2.5,
    beta: float = 1.0,
    noise: float = 0.0,
) -> Instance:
    """Random instance: senders uniform in a side x side square, lengths
    uniform in [l_min, l_max], directions uniform in [0, 2pi).

    Receivers may land outside the square. Deterministic for a given seed.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not (0.0 < l_min <= l_max):
        raise ValueError(f"need 0 < l_min <= l_max, got l_min={l_min}, l_max={l_max}")
    if not (side > 0.0):
        raise ValueError(f"side must be positive, got {side}")

    rng = stream_rng(seed, STREAM_INSTANCE)
    sx = rng.uniform(0.0, side, n)
    sy = rng.uniform(0.0, side, n)
    lengths = rng.uniform(l_min, l_max, n)
    angles = rng.uniform(0.0, 2.0 * math.pi, n)

    links = tuple(
        Link(
            id=i,
            sender=Point(float(sx[i]), float(sy[i])),
            receiver=Point(
                float(sx[i] + lengths[i] * math.cos(angles[i])),
                float(sy[i] + lengths[i] * math.sin(angles[i])),
            ),
        )
        for i in range(n)
    )
    return Instance(links=links, alpha=alpha, beta=beta, noise=noise)


def _fmt(x: float) -> str:
    # 17 significant digits round-trip any float exactly
    return format(float(x), ".17g")


def instance_to_text(inst: Instance) -> str:
    """Serialize: header "n alpha beta noise", one "id sx sy rx ry" line per link."""
    lines = [f"{inst.n} {_fmt(inst.alpha)} {_fmt(inst.beta)} {_fmt(inst.noise)}"]
    for link in inst.links:
        lines.append(
            f"{link.id} {_fmt(link.sender.x)} {_fmt(link.sender.y)}"
            f" {_fmt(link.receiver.x)} {_fmt(link.receiver.y)}"
        )
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> Instance:
    """Inverse of instance_to_text. Raises ValueError on malformed input."""
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        raise ValueError("empty instance text")
    head = rows[0].split()
    if len(head) != 4:
        raise ValueError(f"header must be 'n alpha beta noise', got {rows[0]!r}")
    n = int(head[0])
    alpha, beta, noise = (float(v) for v in head[1:])
    if len(rows) - 1 != n:
        raise ValueError(f"header declares {n} links but {len(rows) - 1} lines follow")
    links = []
    for row in rows[1:]:
        parts = row.split()
        if len(parts) != 5:
            raise ValueError(f"link line must be 'id sx sy rx ry', got {row!r}")
        links.append(
            Link(
                id=int(parts[0]),
                sender=Point(float(parts[1]), float(parts[2])),
                receiver=Point(float(parts[3]), float(parts[4])),
            )
        )
    return Instance(links=tuple(links), alpha=alpha, beta=beta, noise=noise)


def save_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(instance_to_text(inst))


def load_instance(path) -> Instance:
    with open(path, "r", encoding="ascii") as fh:
        return parse_instance(fh.read())
