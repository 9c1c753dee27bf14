"""Counter-based random streams keyed by Monte-Carlo trial indices.

Every stream is a Philox generator whose seed sequence is spawned from the
user seed with an explicit key, so a trial draws the same numbers no matter
which worker evaluates it or in which order.
"""

import numpy as np

# first element of every spawn key; keeps input/noise/aux streams disjoint
INPUT_STREAM = 0
NOISE_STREAM = 1
SEQUENCE_STREAM = 2
CHANNEL_STREAM = 3


def stream(seed, *key):
    """Return a Philox-backed generator for ``(seed, *key)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def input_stream(seed, i):
    return stream(seed, INPUT_STREAM, i)


def noise_stream(seed, i, j):
    return stream(seed, NOISE_STREAM, i, j)


def complex_normal(rng, size):
    """Draw circularly-symmetric CN(0, 1) samples."""
    x = rng.standard_normal((2,) + tuple(np.atleast_1d(size)))
    return (x[0] + 1j * x[1]) * np.sqrt(0.5)
