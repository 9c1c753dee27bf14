import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from sdentropy.model import ChannelInstance, make_constellation  # noqa: E402
from sdentropy.rng import complex_normal  # noqa: E402

BINARY = make_constellation("binary", 2)
QAM4 = make_constellation("qam", 4)


def random_instance(seed):
    """A small seeded problem: channel, constellation, rho, drawn input and z.

    Alternates binary / 4-QAM; sizes keep ``M**N_t <= 4096``.
    """
    rng = np.random.default_rng([7, seed])
    const = BINARY if seed % 2 == 0 else QAM4
    n = int(rng.integers(2, 7))
    snr_db = float(rng.uniform(-5.0, 15.0))
    rho = 10 ** (snr_db / 10)
    H = complex_normal(rng, (n, n)) / np.sqrt(n)
    ch = ChannelInstance.from_matrix(H, ordered=bool(seed % 3 == 0))
    idx = rng.integers(0, const.M, size=n)
    d = const.scaled(rho)[idx]
    z = H @ d + complex_normal(rng, n)
    return ch, const, rho, idx, z


@pytest.fixture
def binary():
    return BINARY


@pytest.fixture
def qam4():
    return QAM4
