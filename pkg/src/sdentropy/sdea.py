"""SNR-partitioned mixture-density approximation.

After sorted QR the streams are split by their gains ``|r_kk|**2`` into a
weak block A, a middle block B and a strong block C::

    [v_A]   [A  B_A  C_A] [d_A]
    [v_B] = [0  B    C_B] [d_B] + w
    [v_C]   [0  0    C  ] [d_C]

The strong block is evaluated at the *drawn* input (genie knowledge from the
Monte-Carlo loop), the middle block by a tree search on
``v_B - C_B d_C``, and the weak block by one moment-matched Gaussian per
middle-block candidate. The result is an approximation, not a bound, which
is why the estimators here return :class:`ApproxEstimate`.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .estimators import gaussian_bound, noise_entropy_bits, rho_c, seb, _bits_mean
from .linalg import HermitianPD
from .logsum import logsumexp
from .model import ChannelInstance
from .montecarlo import run_trials
from .search import SearchParams, babai_indices, path_cost, run_search

__all__ = [
    "ApproxEstimate",
    "SnrPartition",
    "partition",
    "choose_thresholds",
    "sdea_log_pdf",
    "sdea_mi",
]


@dataclass(frozen=True)
class ApproxEstimate:
    """Monte-Carlo entropy approximation (not a bound) in bits per vector.

    ``mi`` is ``mi_raw`` clipped to ``mi_cap`` when a cap is set.
    """

    N_t: int
    h: float
    stderr: float
    n_samples: int
    mean_visited_nodes: float
    n_sentinels: int = 0
    n_fallbacks: int = 0
    mi_cap: float = None
    info: dict = None
    samples: np.ndarray = None

    @property
    def mi_raw(self):
        return self.h - noise_entropy_bits(self.N_t)

    @property
    def mi(self):
        if self.mi_cap is None:
            return self.mi_raw
        return min(self.mi_raw, self.mi_cap)


@dataclass(frozen=True)
class SnrPartition:
    """Block split of ``R`` by stream gain (see module docstring)."""

    R: np.ndarray
    N_A: int
    N_B: int
    N_C: int
    gamma_l: float
    gamma_h: float
    rho: float

    @property
    def sA(self):
        return slice(0, self.N_A)

    @property
    def sB(self):
        return slice(self.N_A, self.N_A + self.N_B)

    @property
    def sC(self):
        return slice(self.N_A + self.N_B, self.R.shape[0])

    def block(self, rows, cols):
        s = {"A": self.sA, "B": self.sB, "C": self.sC}
        return self.R[s[rows], s[cols]]

    @property
    def A(self):
        return self.block("A", "A")

    @property
    def B(self):
        return self.block("B", "B")

    @property
    def C(self):
        return self.block("C", "C")

    @property
    def B_A(self):
        return self.block("A", "B")

    @property
    def C_A(self):
        return self.block("A", "C")

    @property
    def C_B(self):
        return self.block("B", "C")

    def K_A(self):
        A = self.A
        return HermitianPD(self.rho * (A @ A.conj().T) + np.eye(self.N_A))


def partition(channel, gamma_l, gamma_h, rho, rho_ref=None):
    """Split the streams of an (ideally sorted) channel into A/B/C blocks.

    The thresholds are scaled by ``rho_ref / rho`` before being compared to
    ``|r_kk|**2``. ``N_A`` counts the leading streams at or below the low
    threshold and ``N_C`` the trailing streams above the high one; anything
    in between, including out-of-order stragglers, goes to B.

    Parameters
    ----------
    channel : ChannelInstance
    gamma_l, gamma_h : float
        Linear thresholds at the reference SNR, ``gamma_l <= gamma_h``.
    rho : float
        Operating per-symbol SNR.
    rho_ref : float, optional
        SNR the thresholds refer to; unscaled when omitted.
    """
    if gamma_l > gamma_h:
        raise InvalidArgumentError(f"gamma_l={gamma_l} exceeds gamma_h={gamma_h}")
    lam = channel.lambda_sq
    n = lam.size
    if rho_ref is None:
        scale = 1.0
    elif rho == 0:
        scale = math.inf
    else:
        scale = rho_ref / rho
    gl, gh = gamma_l * scale, gamma_h * scale

    N_A = 0
    while N_A < n and lam[N_A] <= gl:
        N_A += 1
    N_C = 0
    while N_C < n - N_A and lam[n - 1 - N_C] > gh:
        N_C += 1
    return SnrPartition(
        R=channel.R, N_A=N_A, N_B=n - N_A - N_C, N_C=N_C,
        gamma_l=gl, gamma_h=gh, rho=float(rho),
    )


def choose_thresholds(lambda_sq, delta_gamma, gamma_c=None):
    """Thresholds of width ``delta_gamma`` placed around ``gamma_c``.

    ``gamma_l`` and ``gamma_h`` split the width in proportion to the
    distances from ``gamma_c`` to the smallest and largest gains. Without
    ``gamma_c`` the midpoint of the gain range is used.

    Returns
    -------
    gamma_l, gamma_h : float
    degenerate : bool
        True when all gains are equal; both thresholds are then ``gamma_c``.
    """
    if delta_gamma < 0:
        raise InvalidArgumentError(f"delta_gamma must be >= 0, got {delta_gamma}")
    lam = np.asarray(lambda_sq, dtype=float)
    lo, hi = float(lam.min()), float(lam.max())
    if gamma_c is None:
        gamma_c = 0.5 * (lo + hi)
    span = hi - lo
    if span == 0:
        return gamma_c, gamma_c, True
    gl = gamma_c + (lo - gamma_c) / span * delta_gamma
    gh = gamma_c + (hi - gamma_c) / span * delta_gamma
    return gl, gh, False


class _PartitionedModel:
    """Per-(channel, rho) constants reused across Monte-Carlo samples."""

    def __init__(self, part, constellation, rho):
        self.part = part
        self.M = constellation.M
        self.const = constellation
        self.rho = rho
        self.sp = constellation.scaled(rho)
        log_piM = math.log(math.pi * self.M)
        self.prefix_C = -part.N_C * log_piM
        self.prefix_B = -part.N_B * log_piM
        self.B, self.C, self.C_B = part.B, part.C, part.C_B
        self.B_A, self.C_A = part.B_A, part.C_A
        if part.N_A:
            self.K_A = part.K_A()
            self.prefix_A = -part.N_A * math.log(math.pi) - self.K_A.logdet()

    def log_pdf(self, v, d_tree, search):
        p = self.part
        dC = d_tree[p.sC]
        rC = v[p.sC] - self.C @ dC
        term_C = self.prefix_C - float(np.sum(rC.real ** 2 + rC.imag ** 2))

        fallback = 0
        visited = 0
        if p.N_B:
            vB = v[p.sB] - self.C_B @ dC
            cs = run_search(vB, self.B, search, self.const, self.rho)
            visited = cs.visited_nodes
            if cs.size:
                dist, idx = cs.distances, cs.indices
            else:
                idx = babai_indices(vB, self.B, self.const, self.rho)[None, :]
                dist = np.array([path_cost(vB, self.B, idx[0], self.sp)])
                fallback = 1
            inner = -dist
        else:
            idx = np.zeros((1, 0), dtype=np.intp)
            inner = np.zeros(1)

        if p.N_A:
            vA = v[p.sA] - self.C_A @ dC
            resid = vA[:, None] - self.B_A @ self.sp[idx].T
            inner = inner + (self.prefix_A - self.K_A.quad_form(resid))
        return term_C + (self.prefix_B + logsumexp(inner)), visited, fallback


def sdea_log_pdf(v, part, d_drawn, search, constellation, rho):
    """Approximate ``log f(v)`` for one sample.

    Parameters
    ----------
    v : (N,) array_like
        Rotated observation ``Q^H z``.
    part : SnrPartition
    d_drawn : (N,) array_like
        The input vector that generated ``v`` (scaled symbols, ``R``
        column order). Only its C-block is used.
    search : SearchParams
        Search run on the middle block.

    Returns
    -------
    float
        Natural-log density approximation.
    """
    model = _PartitionedModel(part, constellation, rho)
    return model.log_pdf(np.asarray(v, dtype=complex), np.asarray(d_drawn), search)[0]


def sdea_mi(channel, constellation, rho, thresholds, search, N_d, N_n, seed,
            rho_ref=None, clip=True, threads=None):
    """Monte-Carlo entropy / mutual information of the partitioned approximation.

    Parameters
    ----------
    channel : ChannelInstance or (N, N) array_like
        Refactored with the sorted QR if it is not already.
    thresholds : (float, float)
        ``(gamma_l, gamma_h)`` in linear scale at the SNR ``rho_ref``.
    rho_ref : float, optional
        Reference SNR of the thresholds; defaults to the SNR where the
        Gaussian bound meets the source entropy.
    clip : bool
        Cap the reported mutual information at ``min(GB, SEB)``.

    Returns
    -------
    ApproxEstimate
        ``mean_visited_nodes`` counts middle-block tree nodes only.
    """
    if not isinstance(search, SearchParams):
        raise InvalidArgumentError("search must be a SearchParams")
    ch = channel if isinstance(channel, ChannelInstance) else ChannelInstance.from_matrix(channel)
    ch = ch.reordered()
    if rho_ref is None:
        rho_ref = rho_c(ch, constellation)
    gamma_l, gamma_h = thresholds
    part = partition(ch, gamma_l, gamma_h, rho, rho_ref)
    model = _PartitionedModel(part, constellation, rho)
    QH = ch.Q.conj().T
    perm = ch.perm

    def evaluate(trial):
        return model.log_pdf(QH @ trial.z, trial.d[perm], search)

    out = run_trials(ch.H, constellation, rho, N_d, N_n, seed, evaluate, 3, threads)
    log_f, visited, fallbacks = out.T
    h, se, sentinels = _bits_mean(log_f)
    cap = None
    if clip:
        cap = min(gaussian_bound(ch, rho), seb(constellation.M, ch.N_t))
    return ApproxEstimate(
        N_t=ch.N_t,
        h=h,
        stderr=se,
        n_samples=log_f.size,
        mean_visited_nodes=float(np.mean(visited)),
        n_sentinels=sentinels,
        n_fallbacks=int(fallbacks.sum()),
        mi_cap=cap,
        info={"N_A": part.N_A, "N_B": part.N_B, "N_C": part.N_C,
              "gamma_l": part.gamma_l, "gamma_h": part.gamma_h,
              "rho_ref": rho_ref},
        samples=log_f,
    )
