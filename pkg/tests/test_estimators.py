import math

import numpy as np
import pytest

from oracles import brute_log_density
from conftest import random_instance
from sdentropy.errors import InvalidArgumentError, OracleSizeError
from sdentropy.estimators import (
    gaussian_bound, log_density_bounds, mc_entropy, noise_entropy_bits, rho_c, seb,
    true_entropy_oracle, true_log_density,
)
from sdentropy.model import ChannelInstance, fir_channel, memory10_taps
from sdentropy.rng import complex_normal
from sdentropy.search import CandidateSet, SearchParams, anchor_radius, dfs_search


def test_single_candidate_density():
    cs = CandidateSet(np.zeros((1, 1), dtype=np.intp), np.zeros(1), -math.inf, 2, 5.0, "dfs", 2)
    t = log_density_bounds(cs, 2, 1)
    assert t.log_f_lower == pytest.approx(-math.log(2 * math.pi), abs=1e-15)
    # the other leaf is missing: tail adds exp(-5)
    assert t.log_f_upper_tail == pytest.approx(-math.log(2 * math.pi) + math.log1p(math.exp(-5)))
    assert t.log_f_upper_pruned == t.log_f_lower


@pytest.mark.parametrize("seed", range(8))
def test_full_set_matches_exhaustive(seed):
    ch, const, rho, idx, z = random_instance(seed)
    cs = dfs_search(ch.rotate(z), ch.R, math.inf, const, rho)
    t = log_density_bounds(cs, const.M, ch.N_t)
    ref = brute_log_density(z, ch.H, const.scaled(rho))
    assert abs(t.log_f_lower - ref) <= 1e-10
    assert abs(true_log_density(ch, const, rho, z) - ref) <= 1e-10
    assert t.log_f_upper_tail == t.log_f_lower == t.log_f_upper_pruned


@pytest.mark.parametrize("seed", range(20))
def test_density_ordering_with_pruning(seed):
    ch, const, rho, idx, z = random_instance(seed)
    v = ch.rotate(z)
    zeta, _ = anchor_radius(v, ch.R, const, rho, 1.0)
    cs = dfs_search(v, ch.R, zeta, const, rho)
    t = log_density_bounds(cs, const.M, ch.N_t)
    true = brute_log_density(z, ch.H, const.scaled(rho))
    tol = 1e-10
    assert t.log_f_lower <= true + tol
    assert true <= t.log_f_upper_pruned + tol
    assert t.log_f_upper_pruned <= t.log_f_upper_tail + tol


def test_empty_set_gives_sentinel():
    cs = CandidateSet(np.zeros((0, 2), dtype=np.intp), np.zeros(0), -math.inf, 4, -1.0, "dfs", 2)
    t = log_density_bounds(cs, 2, 2)
    assert t.log_f_lower == -math.inf and t.log_f_upper_pruned == -math.inf


def test_zero_snr_has_zero_mi(binary):
    e = mc_entropy(np.eye(1), binary, 0.0, SearchParams("dfs", alpha=1.0), 20, 10, 0)
    assert abs(e.mi_up) <= 3 * e.stderr_up
    t = true_entropy_oracle(np.eye(1), binary, 0.0, 20, 10, 0)
    assert abs(t.mi_up - e.mi_up) <= 1e-12


def test_alpha_inf_equals_truth_on_paired_seeds(qam4):
    ch = ChannelInstance.from_matrix(complex_normal(np.random.default_rng(3), (4, 4)))
    e = mc_entropy(ch, qam4, 2.0, SearchParams("dfs", alpha=math.inf), 10, 5, 7)
    t = true_entropy_oracle(ch, qam4, 2.0, 10, 5, 7)
    assert np.allclose(e.samples["lower"], t.samples["true"], atol=1e-10, rtol=0)
    assert abs(e.h_up - t.h_up) <= 1e-9
    assert e.h_up == e.h_lo == e.h_lo_plus


def test_bounds_bracket_truth(binary):
    ch = fir_channel(memory10_taps(), 8)
    t = true_entropy_oracle(ch, binary, 0.7, 10, 5, 2)
    e = mc_entropy(ch, binary, 0.7, SearchParams("dfs", alpha=1.2), 10, 5, 2)
    assert e.h_lo <= e.h_lo_plus <= t.h_up + 1e-9 <= e.h_up + 2e-9
    b = mc_entropy(ch, binary, 0.7, SearchParams("bfs", K=4), 10, 5, 2)
    assert b.h_lo is None
    assert b.h_lo_plus <= t.h_up + 1e-9 <= b.h_up + 2e-9
    assert b.mean_visited_nodes == 2 + 4 + 8 + 5 * 8


def test_thread_count_does_not_change_results(qam4):
    ch = ChannelInstance.from_matrix(complex_normal(np.random.default_rng(8), (4, 4)))
    s = SearchParams("dfs", alpha=1.5)
    a = mc_entropy(ch, qam4, 3.0, s, 12, 4, 9, threads=1)
    b = mc_entropy(ch, qam4, 3.0, s, 12, 4, 9, threads=4)
    for k in a.samples:
        assert np.array_equal(a.samples[k], b.samples[k], equal_nan=True)


def test_oracle_cap(qam4):
    with pytest.raises(OracleSizeError) as exc:
        true_entropy_oracle(np.eye(11), qam4, 1.0, 1, 1, 0)
    assert exc.value.n_components == 4 ** 11


def test_permutation_invariance(binary):
    rng = np.random.default_rng(21)
    H = complex_normal(rng, (5, 5))
    P = np.eye(5)[:, [3, 0, 4, 1, 2]]
    # a column permutation of H relabels inputs; with the same z the mixtures coincide
    z = complex_normal(rng, 5) * 2
    a = true_log_density(H, binary, 1.5, z)
    b = true_log_density(H @ P, binary, 1.5, z)
    assert abs(a - b) <= 1e-9


def test_truth_below_trivial_bounds(qam4):
    ch = ChannelInstance.from_matrix(complex_normal(np.random.default_rng(1), (3, 3)))
    for rho in (0.1, 1.0, 10.0, 100.0):
        t = true_entropy_oracle(ch, qam4, rho, 30, 10, 0)
        tol = 3 * t.stderr_up
        assert t.mi_up <= gaussian_bound(ch, rho) + tol
        assert t.mi_up <= seb(4, 3) + tol


def test_gaussian_bound_examples():
    assert gaussian_bound(np.eye(3), 0.0) == 0.0
    assert gaussian_bound(np.eye(2), 1.0) == pytest.approx(2.0, abs=1e-14)
    H = complex_normal(np.random.default_rng(0), (6, 6))
    s = np.linalg.svd(H, compute_uv=False)
    assert gaussian_bound(H, 3.0) == pytest.approx(np.sum(np.log2(1 + 3.0 * s ** 2)), abs=1e-9)
    with pytest.raises(InvalidArgumentError):
        gaussian_bound(H, -1.0)


def test_seb_and_noise_entropy():
    assert seb(4, 8) == 16.0
    assert noise_entropy_bits(2) == pytest.approx(2 * math.log2(math.pi * math.e))


def test_rho_c_examples(binary, qam4):
    assert rho_c(np.eye(1), binary) == pytest.approx(1.0, rel=1e-9)
    assert rho_c(np.eye(1), qam4) == pytest.approx(3.0, rel=1e-9)
    ch = fir_channel(memory10_taps(), 11)
    r = rho_c(ch, binary)
    assert abs(gaussian_bound(ch, r) - seb(2, 11)) <= 1e-5
    with pytest.raises(InvalidArgumentError):
        rho_c(np.zeros((2, 2)), binary)
