"""Seedable random streams.

Every randomized component draws from its own named stream so that, for a
fixed seed, changing how one component consumes randomness does not perturb
the draws seen by the others.
"""

import numpy as np

STREAM_INSTANCE = 0
STREAM_ARRIVALS = 1
STREAM_PROTOCOL = 2


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    """Generator for one named stream of a seed. Streams are independent."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(ss))
