"""Reference estimators: statistical approximation, Hamming-distance-1
mixture reduction, and forward-recursion information rates of FIR channels.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, OracleSizeError
from .estimators import _bits_mean
from .linalg import HermitianPD
from .logsum import LOG2E, logsumexp
from .model import ChannelInstance, _normalized_taps
from .montecarlo import run_trials
from .rng import SEQUENCE_STREAM, complex_normal, stream
from .sdea import ApproxEstimate
from .search import babai_indices

__all__ = [
    "sa_log_pdf",
    "hd1_candidates",
    "hd1_log_pdf",
    "sa_mi",
    "hd1_mi",
    "BcjrResult",
    "bcjr_mi",
    "rsub_complexity",
    "trellis_complexity",
]


def _covariance(H, rho):
    H = np.asarray(H, dtype=complex)
    return HermitianPD(rho * (H @ H.conj().T) + np.eye(H.shape[0]))


def _log_f_high(z, H, d_drawn, M):
    N = H.shape[0]
    r = z - H @ d_drawn
    return -N * math.log(math.pi * M) - float(np.sum(r.real ** 2 + r.imag ** 2))


def _log_f_low(z, K):
    return -K.n * math.log(math.pi) - K.logdet() - float(K.quad_form(z))


def sa_log_pdf(z, channel, d_drawn, rho, M_c, K_z=None):
    """``max(log f_h, log f_l)`` of the statistical approximation.

    ``f_h`` is the single mixture component of the drawn input and ``f_l``
    the Gaussian with covariance ``K_z = rho H H^H + I``.
    """
    H = channel.H if isinstance(channel, ChannelInstance) else np.asarray(channel, dtype=complex)
    K_z = _covariance(H, rho) if K_z is None else K_z
    z = np.asarray(z, dtype=complex)
    return max(_log_f_high(z, H, d_drawn, M_c), _log_f_low(z, K_z))


def hd1_candidates(idx0, M):
    """The anchor plus every vector differing from it in exactly one symbol."""
    idx0 = np.asarray(idx0)
    N = idx0.size
    out = [idx0.copy()]
    for i in range(N):
        for m in range(M):
            if m != idx0[i]:
                c = idx0.copy()
                c[i] = m
                out.append(c)
    return np.array(out).reshape(1 + N * (M - 1), N)


def _log_f_medium(v, R, idx0, constellation, rho):
    cand = hd1_candidates(idx0, constellation.M)
    sp = constellation.scaled(rho)
    diff = v[None, :] - sp[cand] @ R.T
    D = np.sum(diff.real ** 2 + diff.imag ** 2, axis=1)
    N = R.shape[0]
    return -N * math.log(math.pi * constellation.M) + logsumexp(-D)


def hd1_log_pdf(z, channel, constellation, rho, d_drawn, K_z=None):
    """``max(log f_h, log f_m, log f_l)`` with ``f_m`` over the HD1 set
    around the Babai point."""
    ch = channel if isinstance(channel, ChannelInstance) else ChannelInstance.from_matrix(channel)
    K_z = _covariance(ch.H, rho) if K_z is None else K_z
    z = np.asarray(z, dtype=complex)
    v = ch.rotate(z)
    idx0 = babai_indices(v, ch.R, constellation, rho)
    return max(
        _log_f_high(z, ch.H, d_drawn, constellation.M),
        _log_f_medium(v, ch.R, idx0, constellation, rho),
        _log_f_low(z, K_z),
    )


def _approx(log_f, N_t, nodes):
    h, se, s = _bits_mean(log_f)
    return ApproxEstimate(N_t=N_t, h=h, stderr=se, n_samples=log_f.size,
                          mean_visited_nodes=float(nodes), n_sentinels=s,
                          samples=log_f)


def sa_mi(channel, constellation, rho, N_d, N_n, seed, threads=None):
    """Monte-Carlo entropy of the statistical approximation (paired trials)."""
    H = channel.H if isinstance(channel, ChannelInstance) else np.asarray(channel, dtype=complex)
    K_z = _covariance(H, rho)
    M = constellation.M

    def evaluate(t):
        return (max(_log_f_high(t.z, H, t.d, M), _log_f_low(t.z, K_z)),)

    out = run_trials(H, constellation, rho, N_d, N_n, seed, evaluate, 1, threads)
    return _approx(out[:, 0], H.shape[0], 1)


def hd1_mi(channel, constellation, rho, N_d, N_n, seed, threads=None):
    """Monte-Carlo entropy of the HD1 approximation (paired trials).

    ``mean_visited_nodes`` reports the ``N_t (M - 1)`` neighbours searched.
    """
    ch = channel if isinstance(channel, ChannelInstance) else ChannelInstance.from_matrix(channel)
    K_z = _covariance(ch.H, rho)
    QH, R, H = ch.Q.conj().T, ch.R, ch.H
    M = constellation.M

    def evaluate(t):
        v = QH @ t.z
        idx0 = babai_indices(v, R, constellation, rho)
        return (max(_log_f_high(t.z, H, t.d, M),
                    _log_f_medium(v, R, idx0, constellation, rho),
                    _log_f_low(t.z, K_z)),)

    out = run_trials(H, constellation, rho, N_d, N_n, seed, evaluate, 1, threads)
    return _approx(out[:, 0], ch.N_t, ch.N_t * (M - 1))


def trellis_complexity(M, L, N_t, Q=None):
    """Visited trellis states over the first ``N_t`` stages from a known start.

    Stage ``k`` expands ``M`` branches out of each of the
    ``min(M**(k-1), M**L, Q)`` states kept after stage ``k - 1``.
    """
    S = M ** L
    cap = S if Q is None else min(S, int(Q))
    return M * sum(min(M ** k, cap) for k in range(N_t))


def rsub_complexity(Q, M_c, N_t):
    """``M (sum_{k<=q0} M**k + sum_{q0<k<N_t} Q)``, ``q0 = max{k : M**k < Q}``."""
    M, Q = int(M_c), int(Q)
    q0 = 0
    while M ** (q0 + 1) < Q:
        q0 += 1
    if M ** q0 >= Q:
        q0 = -1
    head = sum(M ** k for k in range(min(q0, N_t - 1) + 1))
    tail = max(0, N_t - 1 - q0) * Q
    return M * (head + tail)


@dataclass(frozen=True)
class BcjrResult:
    """Forward-recursion information rate of one simulated sequence."""

    mi: float  # bits per symbol
    log_p: float  # natural log of p(z^n) over the averaged stages
    n: int
    n_used: int
    n_states: int
    Q: int
    visited_states: int  # over the first ``count_stages`` stages
    count_stages: int
    stderr: float = 0.0  # batch-means standard error of ``mi``


def _trellis(taps, sp):
    """Branch tables ``(pred, sym, mean)``, each ``(S, B)``.

    State id ``sum_l idx_{t-l} M**l`` holds the last ``L`` inputs. Every
    next state has ``M`` incoming branches.
    """
    M = sp.size
    L = taps.size - 1
    S = M ** L
    ns = np.arange(S)
    if L == 0:
        pred = np.zeros((1, M), dtype=np.intp)
        sym = np.arange(M)[None, :]
        mean = taps[0] * sp[sym]
        return pred, sym, mean
    top = M ** (L - 1)
    pred = (ns // M)[:, None] + top * np.arange(M)[None, :]
    sym = np.repeat((ns % M)[:, None], M, axis=1)
    mean = taps[0] * sp[sym]
    for l in range(1, L + 1):
        hist = (pred // M ** (l - 1)) % M
        mean = mean + taps[l] * sp[hist]
    return pred, sym, mean


def bcjr_mi(g, constellation, rho, n, Q=None, seed=0, warmup=None,
            count_stages=None, max_states=2 ** 16):
    """Information rate of a FIR channel by the forward sum-product recursion.

    Parameters
    ----------
    g : sequence of complex
        Channel taps, power-normalized internally.
    constellation : Constellation
    rho : float
        Per-symbol SNR.
    n : int
        Simulated sequence length.
    Q : int, optional
        Keep only the ``Q`` states with the largest forward metric at each
        stage (ties to the lower state id). ``None`` runs the full trellis.
    seed : int
    warmup : int, optional
        Leading stages excluded from the rate average; default ``4 L``.
    count_stages : int, optional
        Number of leading stages whose visited states are counted;
        defaults to ``L + 1``.
    max_states : int
        Refuse trellises with more than this many states.

    Returns
    -------
    BcjrResult
    """
    taps = _normalized_taps(g)
    L = taps.size - 1
    M = constellation.M
    S = M ** L
    if S > max_states:
        raise OracleSizeError(S, max_states)
    n = int(n)
    warmup = 4 * L if warmup is None else int(warmup)
    if n <= warmup:
        raise InvalidArgumentError(f"sequence length {n} must exceed warm-up {warmup}")
    count_stages = L + 1 if count_stages is None else int(count_stages)
    if Q is not None and int(Q) < 1:
        raise InvalidArgumentError(f"Q must be >= 1, got {Q}")

    sp = constellation.scaled(rho)
    rng = stream(seed, SEQUENCE_STREAM)
    idx = rng.integers(0, M, size=n + L)
    x = sp[idx]
    z = np.convolve(x, taps)[L:L + n] + complex_normal(rng, n)

    pred, _, mean = _trellis(taps, sp)
    log_branch_const = -math.log(M) - math.log(math.pi)

    # known initial state: the L symbols preceding the sequence
    s0 = int(sum(idx[L - 1 - l] * M ** l for l in range(L)))
    logm = np.full(S, -np.inf)
    logm[s0] = 0.0
    state_ids = np.arange(S)
    active = 1
    visited = 0
    stage_log = np.empty(n)
    for k in range(n):
        if k < count_stages:
            visited += M * active
        u = z[k] - mean
        metric = logm[pred] + (log_branch_const - (u.real ** 2 + u.imag ** 2))
        mx = metric.max(axis=1)
        finite = np.isfinite(mx)
        new = np.full(S, -np.inf)
        new[finite] = mx[finite] + np.log(
            np.sum(np.exp(metric[finite] - mx[finite, None]), axis=1)
        )
        c = logsumexp(new[finite])
        new -= c
        stage_log[k] = c
        if Q is not None and np.count_nonzero(finite) > Q:
            order = np.lexsort((state_ids, -new))
            new[order[int(Q):]] = -np.inf
        logm = new
        active = int(np.count_nonzero(np.isfinite(logm)))

    n_used = n - warmup
    used = stage_log[warmup:]
    total = float(np.sum(used))
    mi = -total / n_used * LOG2E - math.log2(math.pi * math.e)
    # stage terms are correlated over about L stages; batch them
    n_batches = min(50, n_used // max(1, 10 * (L + 1)))
    se = 0.0
    if n_batches >= 2:
        b = used[: n_batches * (n_used // n_batches)].reshape(n_batches, -1).mean(axis=1)
        se = float(np.std(b * LOG2E, ddof=1) / math.sqrt(n_batches))
    return BcjrResult(
        mi=mi, log_p=total, n=n, n_used=n_used, n_states=S,
        Q=None if Q is None else int(Q), visited_states=visited,
        count_stages=count_stages, stderr=se,
    )
