import math

import numpy as np
import pytest

from oracles import brute_log_density
from conftest import random_instance
from sdentropy.baselines import (
    bcjr_mi, hd1_candidates, hd1_log_pdf, hd1_mi, rsub_complexity, sa_log_pdf, sa_mi,
    trellis_complexity,
)
from sdentropy.baselines import _log_f_medium
from sdentropy.errors import InvalidArgumentError, OracleSizeError
from sdentropy.estimators import gaussian_bound, true_entropy_oracle
from sdentropy.model import ChannelInstance, fir_channel, memory10_taps
from sdentropy.rng import complex_normal
from sdentropy.search import babai_indices


def test_hd1_sizes():
    assert hd1_candidates(np.zeros(3, dtype=int), 2).shape == (4, 3)
    c = hd1_candidates(np.zeros(8, dtype=int), 4)
    assert c.shape == (25, 8)
    assert np.unique(c, axis=0).shape[0] == 25
    assert np.all(np.sum(c != 0, axis=1) <= 1)


def test_sa_matches_both_formulas(qam4):
    rng = np.random.default_rng(3)
    H = complex_normal(rng, (3, 3))
    rho = 2.0
    d = qam4.scaled(rho)[rng.integers(0, 4, 3)]
    z = H @ d + complex_normal(rng, 3)
    f_h = -3 * math.log(4 * math.pi) - np.sum(np.abs(z - H @ d) ** 2)
    K = rho * H @ H.conj().T + np.eye(3)
    f_l = -3 * math.log(math.pi) - np.linalg.slogdet(K)[1] - (z.conj() @ np.linalg.solve(K, z)).real
    assert sa_log_pdf(z, H, d, rho, 4) == pytest.approx(max(f_h, f_l), abs=1e-10)


def test_sa_noiseless_high_snr(binary):
    H = np.eye(2) + 0.3 * np.ones((2, 2))
    d = binary.scaled(1e4)[[0, 1]]
    z = H @ d
    assert sa_log_pdf(z, H, d, 1e4, 2) == pytest.approx(-2 * math.log(2 * math.pi))


def test_sa_low_snr_near_gaussian_bound(binary):
    ch = fir_channel(memory10_taps(), 6)
    e = sa_mi(ch, binary, 1e-3, 20, 10, 0)
    assert abs(e.mi - gaussian_bound(ch, 1e-3)) <= 3 * e.stderr + 1e-3


@pytest.mark.parametrize("seed", range(12))
def test_components_below_true_density(seed):
    ch, const, rho, idx, z = random_instance(seed)
    sp = const.scaled(rho)
    true = brute_log_density(z, ch.H, sp)
    d = sp[idx]
    f_h = -ch.N_t * math.log(math.pi * const.M) - np.sum(np.abs(z - ch.H @ d) ** 2)
    assert f_h <= true + 1e-10
    v = ch.rotate(z)
    f_m = _log_f_medium(v, ch.R, babai_indices(v, ch.R, const, rho), const, rho)
    assert f_m <= true + 1e-10
    hd = hd1_log_pdf(z, ch, const, rho, d)
    assert hd >= f_m


def test_hd1_mi_runs(qam4):
    ch = ChannelInstance.from_matrix(complex_normal(np.random.default_rng(0), (4, 4)))
    e = hd1_mi(ch, qam4, 2.0, 5, 5, 0)
    assert e.mean_visited_nodes == 12
    assert math.isfinite(e.mi) and e.n_sentinels == 0


def test_complexity_formulas():
    assert rsub_complexity(100, 2, 11) == 1054
    assert trellis_complexity(2, 10, 11, 100) == 1054
    assert trellis_complexity(2, 10, 11) == 2 * (2 ** 11 - 1)
    for M, L, n, Q in [(2, 10, 11, 7), (4, 3, 8, 20), (2, 4, 9, 64), (4, 2, 5, 3)]:
        Qc = min(Q, M ** L)
        assert trellis_complexity(M, L, n, Q) == rsub_complexity(Qc, M, n)


def test_bcjr_memoryless_matches_oracle(binary):
    rho = 1.0
    r = bcjr_mi([1.0], binary, rho, 20000, seed=1)
    t = true_entropy_oracle(np.eye(1), binary, rho, 200, 50, 1)
    assert abs(r.mi - t.mi_up) <= 3 * (r.stderr + t.stderr_up)
    assert r.n_states == 1


def test_bcjr_short_memory_matches_vector_oracle(binary):
    g = [1.0, 0.6, 0.3]
    rho = 1.5
    r = bcjr_mi(g, binary, rho, 30000, seed=2)
    t = true_entropy_oracle(fir_channel(g, 10), binary, rho, 100, 40, 2)
    # the circulant block and the sequence model agree up to edge effects
    assert abs(r.mi - t.mi_up / 10) <= 0.02


def test_reduced_state_is_upper_bound(binary):
    taps = memory10_taps()[3:8]
    full = bcjr_mi(taps, binary, 2.0, 4000, seed=5)
    red = bcjr_mi(taps, binary, 2.0, 4000, Q=3, seed=5)
    assert red.log_p <= full.log_p + 1e-9
    assert red.mi >= full.mi


def test_bcjr_visited_states(binary):
    r = bcjr_mi(memory10_taps(), binary, 1.0, 200, Q=100, seed=0, count_stages=11)
    assert r.visited_states == 1054
    f = bcjr_mi(memory10_taps(), binary, 1.0, 200, seed=0, count_stages=11)
    assert f.visited_states == trellis_complexity(2, 10, 11)


def test_bcjr_arguments(binary):
    with pytest.raises(InvalidArgumentError):
        bcjr_mi([1.0, 0.5], binary, 1.0, 4)
    with pytest.raises(InvalidArgumentError):
        bcjr_mi([1.0, 0.5], binary, 1.0, 100, Q=0)
    with pytest.raises(OracleSizeError):
        bcjr_mi(np.ones(20), binary, 1.0, 100)


def test_bcjr_deterministic(qam4):
    a = bcjr_mi([1.0, 0.5j], qam4, 2.0, 500, seed=4)
    b = bcjr_mi([1.0, 0.5j], qam4, 2.0, 500, seed=4)
    assert a == b
