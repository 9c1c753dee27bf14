"""Paired Monte-Carlo sampling of ``z = H d + n``.

Trial ``(i, j)`` uses input draw ``i`` and noise draw ``(i, j)``, each from
its own keyed stream, so any two estimators run with the same seed see the
same ``(d, n)`` pairs. Per-trial results land in a preallocated array at
index ``i * N_n + j``; reductions over that array are therefore identical
for any worker count.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .model import draw_input
from .rng import complex_normal, input_stream, noise_stream

THREADS_ENV = "SDENTROPY_THREADS"


def default_threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Trial:
    i: int
    j: int
    idx: np.ndarray  # constellation indices of d, original coordinates
    d: np.ndarray
    n: np.ndarray
    z: np.ndarray


def trial_inputs(N_t, constellation, rho, seed, i):
    return draw_input(constellation, N_t, rho, input_stream(seed, i))


def trial_noise(N_t, seed, i, j):
    return complex_normal(noise_stream(seed, i, j), N_t)


def run_trials(H, constellation, rho, N_d, N_n, seed, evaluate, n_out, threads=None,
               batch=False):
    """Evaluate ``evaluate(trial) -> sequence of n_out floats`` on every trial.

    With ``batch=True`` the callback is instead called once per input draw
    as ``evaluate(i, idx, d, Z)`` with the ``(N_n, N_t)`` observations of
    that draw stacked in rows, and must return an ``(N_n, n_out)`` array.

    Returns an ``(N_d * N_n, n_out)`` float array in trial order.
    """
    N_d, N_n = int(N_d), int(N_n)
    if N_d < 1 or N_n < 1:
        raise InvalidArgumentError("N_d and N_n must be >= 1")
    H = np.asarray(H)
    N_t = H.shape[0]
    out = np.empty((N_d * N_n, n_out))

    def outer(i):
        idx, d = trial_inputs(N_t, constellation, rho, seed, i)
        Hd = H @ d
        if batch:
            Z = Hd[None, :] + np.array([trial_noise(N_t, seed, i, j) for j in range(N_n)])
            out[i * N_n:(i + 1) * N_n] = evaluate(i, idx, d, Z)
            return
        for j in range(N_n):
            n = trial_noise(N_t, seed, i, j)
            out[i * N_n + j] = evaluate(Trial(i, j, idx, d, n, Hd + n))

    threads = default_threads() if threads is None else int(threads)
    if threads <= 1:
        for i in range(N_d):
            outer(i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(outer, range(N_d)))
    return out
