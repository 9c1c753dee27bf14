"""Entropy and mutual-information bounds from sphere-decoder candidate sets.

Densities are carried as natural logs throughout and converted to bits only
when averaged into an estimate. For i.u.d. inputs the mixture density is::

    f(v) = (pi * M)**-N * sum_d exp(-||v - R d||**2)

A candidate set gives a lower density (kept leaves only) and two upper
densities: kept leaves plus ``(M**N - |kept|) * exp(-radius_sq)`` (sphere
search only), and kept leaves plus the pruned mass. Lower densities give
upper entropy bounds and vice versa.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, OracleSizeError
from .linalg import HermitianPD
from .logsum import LOG2E, logaddexp, logsumexp
from .model import ChannelInstance
from .montecarlo import run_trials
from .search import SearchParams, run_search

__all__ = [
    "LogDensityTriple",
    "EntropyEstimate",
    "log_density_bounds",
    "noise_entropy_bits",
    "mc_entropy",
    "true_log_density",
    "true_entropy_oracle",
    "gaussian_bound",
    "seb",
    "rho_c",
    "DEFAULT_ORACLE_CAP",
]

DEFAULT_ORACLE_CAP = 2 ** 20


def noise_entropy_bits(N_t):
    """``h(n) = N_t * log2(pi * e)`` for ``n ~ CN(0, I)``."""
    return N_t * math.log2(math.pi * math.e)


@dataclass(frozen=True)
class LogDensityTriple:
    """Natural-log densities bracketing the mixture density at one sample.

    ``log_f_upper_tail`` is ``None`` for the K-best search, which has no
    radius to bound the missing leaves with.
    """

    log_f_lower: float
    log_f_upper_tail: float
    log_f_upper_pruned: float


def log_density_bounds(cs, M_c, N_t):
    """Lower and upper log densities implied by a candidate set."""
    if cs.size == 0 and not math.isfinite(cs.log_pruned_mass):
        return LogDensityTriple(-math.inf, -math.inf if cs.mode == "dfs" else None, -math.inf)
    prefix = -N_t * math.log(math.pi * M_c)
    found = logsumexp(-cs.distances)
    lower = prefix + found
    pruned = prefix + logaddexp(found, cs.log_pruned_mass)
    tail = None
    if cs.mode == "dfs":
        missing = M_c ** N_t - cs.size
        if missing > 0 and math.isfinite(cs.radius_sq):
            tail = prefix + logaddexp(found, math.log(missing) - cs.radius_sq)
        else:
            tail = lower
    return LogDensityTriple(lower, tail, pruned)


def _bits_mean(log_f):
    """Mean and standard error of ``-log2 f`` over finite samples."""
    ok = np.isfinite(log_f)
    x = -log_f[ok] * LOG2E
    if x.size == 0:
        return math.nan, math.nan, int((~ok).sum())
    se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return float(np.mean(x)), se, int((~ok).sum())


@dataclass(frozen=True)
class EntropyEstimate:
    """Monte-Carlo entropy estimates in bits per symbol vector.

    ``h_up`` comes from the lower density, ``h_lo`` from the radius-tail
    upper density and ``h_lo_plus`` from the pruned-mass upper density.
    For the exhaustive oracle all three coincide. Fields that a method
    cannot produce are ``None``.
    """

    N_t: int
    h_up: float
    h_lo: float = None
    h_lo_plus: float = None
    stderr_up: float = 0.0
    stderr_lo: float = None
    stderr_lo_plus: float = None
    n_samples: int = 0
    mean_visited_nodes: float = 0.0
    n_sentinels: int = 0
    samples: dict = field(default=None, repr=False, compare=False)

    def _mi(self, h):
        return None if h is None else h - noise_entropy_bits(self.N_t)

    @property
    def mi_up(self):
        return self._mi(self.h_up)

    @property
    def mi_lo(self):
        return self._mi(self.h_lo)

    @property
    def mi_lo_plus(self):
        return self._mi(self.h_lo_plus)

    def per_symbol(self, value):
        return None if value is None else value / self.N_t


def _as_instance(channel):
    if isinstance(channel, ChannelInstance):
        return channel
    return ChannelInstance.from_matrix(channel)


def mc_entropy(channel, constellation, rho, search, N_d, N_n, seed, threads=None):
    """Sphere-decoder entropy bounds by Monte-Carlo integration.

    Parameters
    ----------
    channel : ChannelInstance or (N, N) array_like
    constellation : Constellation
    rho : float
        Per-symbol SNR (linear).
    search : SearchParams
    N_d, N_n : int
        Number of input draws and noise draws per input.
    seed : int

    Returns
    -------
    EntropyEstimate
    """
    ch = _as_instance(channel)
    if not isinstance(search, SearchParams):
        raise InvalidArgumentError("search must be a SearchParams")
    N_t, M = ch.N_t, constellation.M
    QH, R = ch.Q.conj().T, ch.R

    def evaluate(trial):
        cs = run_search(QH @ trial.z, R, search, constellation, rho)
        t = log_density_bounds(cs, M, N_t)
        tail = math.nan if t.log_f_upper_tail is None else t.log_f_upper_tail
        return t.log_f_lower, tail, t.log_f_upper_pruned, cs.visited_nodes

    out = run_trials(ch.H, constellation, rho, N_d, N_n, seed, evaluate, 4, threads)
    lower, tail, pruned, visited = out.T
    h_up, se_up, s1 = _bits_mean(lower)
    h_lp, se_lp, s3 = _bits_mean(pruned)
    h_lo = se_lo = None
    s2 = 0
    if search.mode == "dfs":
        h_lo, se_lo, s2 = _bits_mean(tail)
    return EntropyEstimate(
        N_t=N_t,
        h_up=h_up,
        h_lo=h_lo,
        h_lo_plus=h_lp,
        stderr_up=se_up,
        stderr_lo=se_lo,
        stderr_lo_plus=se_lp,
        n_samples=out.shape[0],
        mean_visited_nodes=float(np.mean(visited)),
        n_sentinels=max(s1, s2, s3),
        samples={"lower": lower, "tail": tail, "pruned": pruned, "visited": visited},
    )


def _all_symbol_vectors(constellation, rho, N_t):
    sp = constellation.scaled(rho)
    idx = np.indices((constellation.M,) * N_t).reshape(N_t, -1).T
    return sp[idx]


def _check_cap(M, N_t, cap):
    size = M ** N_t
    if size > cap:
        raise OracleSizeError(size, cap)
    return size


class _ExhaustiveMixture:
    """All component means ``H d`` of the mixture, kept in original coordinates."""

    def __init__(self, H, constellation, rho, cap=DEFAULT_ORACLE_CAP):
        H = np.asarray(H, dtype=complex)
        self.N_t = H.shape[0]
        self.M = constellation.M
        _check_cap(self.M, self.N_t, cap)
        self.means = _all_symbol_vectors(constellation, rho, self.N_t) @ H.T
        self.prefix = -self.N_t * math.log(math.pi * self.M)

    def log_density(self, z):
        diff = self.means - z
        D = np.sum(diff.real ** 2 + diff.imag ** 2, axis=1)
        return self.prefix + logsumexp(-D)

    def log_density_rows(self, Z):
        """``log f`` for each row of ``Z`` via ``|m|^2 - 2 Re(m^H z) + |z|^2``."""
        if not hasattr(self, "_norms"):
            self._norms = np.sum(self.means.real ** 2 + self.means.imag ** 2, axis=1)
        cross = (self.means.conj() @ Z.T).real
        D = self._norms[:, None] - 2.0 * cross + np.sum(Z.real ** 2 + Z.imag ** 2, axis=1)[None, :]
        m = (-D).max(axis=0)
        return self.prefix + m + np.log(np.sum(np.exp(-D - m[None, :]), axis=0))


def true_log_density(channel, constellation, rho, z, cap=DEFAULT_ORACLE_CAP):
    """Exact ``log f(z)`` by enumerating every mixture component."""
    H = channel.H if isinstance(channel, ChannelInstance) else channel
    return _ExhaustiveMixture(H, constellation, rho, cap).log_density(np.asarray(z))


def true_entropy_oracle(channel, constellation, rho, N_d, N_n, seed,
                        cap=DEFAULT_ORACLE_CAP, threads=None):
    """Exact-density Monte-Carlo entropy on the same trials as :func:`mc_entropy`.

    Raises
    ------
    OracleSizeError
        If ``M**N_t`` exceeds ``cap``.
    """
    H = channel.H if isinstance(channel, ChannelInstance) else np.asarray(channel, dtype=complex)
    mix = _ExhaustiveMixture(H, constellation, rho, cap)
    full_nodes = sum(constellation.M ** k for k in range(1, mix.N_t + 1))

    mix.log_density_rows(np.zeros((1, mix.N_t), dtype=complex))  # cache norms before threading

    def evaluate(i, idx, d, Z):
        return mix.log_density_rows(Z)[:, None]

    out = run_trials(H, constellation, rho, N_d, N_n, seed, evaluate, 1, threads, batch=True)
    log_f = out[:, 0]
    h, se, s = _bits_mean(log_f)
    return EntropyEstimate(
        N_t=mix.N_t,
        h_up=h,
        h_lo=h,
        h_lo_plus=h,
        stderr_up=se,
        stderr_lo=se,
        stderr_lo_plus=se,
        n_samples=log_f.size,
        mean_visited_nodes=float(full_nodes),
        n_sentinels=s,
        samples={"true": log_f},
    )


def gaussian_bound(channel, rho):
    """``log2 det(I + rho H H^H)`` in bits per symbol vector."""
    H = channel.H if isinstance(channel, ChannelInstance) else np.asarray(channel, dtype=complex)
    if rho < 0:
        raise InvalidArgumentError(f"rho must be >= 0, got {rho}")
    K = HermitianPD(rho * (H @ H.conj().T) + np.eye(H.shape[0]))
    return K.logdet() * LOG2E


def seb(M_c, N_t):
    """Source entropy ``N_t * log2 M_c``."""
    return N_t * math.log2(M_c)


def rho_c(channel, constellation, rtol=1e-10):
    """SNR at which the Gaussian bound reaches the source entropy.

    Solved by bisection; the Gaussian bound is strictly increasing in
    ``rho`` so the crossing is unique.
    """
    H = channel.H if isinstance(channel, ChannelInstance) else np.asarray(channel, dtype=complex)
    if not np.any(H):
        raise InvalidArgumentError("zero channel never reaches the source entropy")
    target = seb(constellation.M, H.shape[0])
    lo, hi = 0.0, 1.0
    while gaussian_bound(H, hi) < target:
        lo, hi = hi, 2.0 * hi
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if gaussian_bound(H, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
