"""Constellations, channel matrices and the linear model ``z = H d + n``.

Power convention: the constellation has unit average energy and each
transmitted symbol is ``sqrt(rho) * s``, so ``rho`` is the per-symbol SNR
under unit-variance noise.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError
from .linalg import qr_positive, sorted_qr
from .rng import complex_normal

__all__ = [
    "Constellation",
    "make_constellation",
    "ChannelInstance",
    "circulant",
    "fir_channel",
    "memory10_taps",
    "selective_channel",
    "draw_input",
    "synthesize",
]


def _is_pow2(m):
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class Constellation:
    """Finite symbol alphabet with unit average energy and uniform prior."""

    points: np.ndarray
    kind: str

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def M(self):
        return self.points.size

    def scaled(self, rho):
        return np.sqrt(rho) * self.points

    def nearest(self, x, rho):
        """Index of the nearest scaled point for every entry of ``x``.

        Ties resolve to the lowest point index.
        """
        sp = self.scaled(rho)
        x = np.asarray(x, dtype=complex)
        dist = np.abs(x[..., None] - sp) ** 2
        return np.argmin(dist, axis=-1)

    def __eq__(self, other):
        return (
            isinstance(other, Constellation)
            and self.kind == other.kind
            and np.array_equal(self.points, other.points)
        )

    def __hash__(self):
        return hash((self.kind, self.points.tobytes()))


def make_constellation(kind, M_c):
    """Build a unit-energy constellation.

    Parameters
    ----------
    kind : {'binary', 'pam', 'qam'}
    M_c : int
        Number of points. ``binary`` needs 2, ``pam`` a power of two,
        ``qam`` a power of four.

    Returns
    -------
    Constellation
        Points sorted lexicographically by ``(real, imag)``.
    """
    kind = str(kind).lower()
    M_c = int(M_c)
    if M_c < 2:
        raise InvalidArgumentError(f"M_c must be >= 2, got {M_c}")
    if kind == "binary":
        if M_c != 2:
            raise InvalidArgumentError("binary constellation has M_c = 2")
        pts = np.array([-1.0, 1.0])
    elif kind == "pam":
        if not _is_pow2(M_c):
            raise InvalidArgumentError(f"PAM needs a power of two, got {M_c}")
        pts = np.arange(-(M_c - 1), M_c, 2, dtype=float)
    elif kind == "qam":
        side = int(round(np.sqrt(M_c)))
        if side * side != M_c or not _is_pow2(side) or side < 2:
            raise InvalidArgumentError(f"QAM needs a power of four, got {M_c}")
        axis = np.arange(-(side - 1), side, 2, dtype=float)
        re, im = np.meshgrid(axis, axis, indexing="ij")
        pts = (re + 1j * im).ravel()
    else:
        raise InvalidArgumentError(f"unknown constellation kind {kind!r}")

    pts = pts.astype(complex)
    pts /= np.sqrt(np.mean(np.abs(pts) ** 2))
    order = np.lexsort((pts.imag, pts.real))
    return Constellation(pts[order], kind)


@dataclass(frozen=True)
class ChannelInstance:
    """Channel matrix with cached QR factors.

    ``Q @ R == H[:, perm]``. Tree searches operate on ``R``, whose column
    ``k`` corresponds to transmit stream ``perm[k]``.
    """

    H: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    perm: np.ndarray
    ordered: bool = False
    lambda_sq: np.ndarray = field(init=False)

    def __post_init__(self):
        for name in ("H", "Q", "R", "perm"):
            getattr(self, name).setflags(write=False)
        lam = np.abs(np.diagonal(self.R)) ** 2
        lam.setflags(write=False)
        object.__setattr__(self, "lambda_sq", lam)

    @classmethod
    def from_matrix(cls, H, ordered=False):
        """Factor ``H``; ``ordered=True`` uses the greedy sorted QR."""
        H = np.array(H, dtype=complex)
        if ordered:
            Q, R, perm = sorted_qr(H)
        else:
            Q, R = qr_positive(H)
            perm = np.arange(H.shape[0])
        return cls(H, Q, R, np.asarray(perm), bool(ordered))

    @property
    def N_t(self):
        return self.H.shape[0]

    def reordered(self):
        """The same channel factored with the sorted QR."""
        if self.ordered:
            return self
        return ChannelInstance.from_matrix(self.H, ordered=True)

    def rotate(self, z):
        """``v = Q^H z``."""
        return self.Q.conj().T @ z

    def to_tree(self, d):
        """Reorder a symbol vector (or index vector) into ``R`` coordinates."""
        return np.asarray(d)[..., self.perm]

    def from_tree(self, d):
        out = np.empty_like(np.asarray(d))
        out[..., self.perm] = d
        return out


def circulant(first_column):
    """Circulant matrix whose first column is ``first_column``."""
    c = np.asarray(first_column, dtype=complex)
    n = c.size
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return c[idx]


def memory10_taps():
    """Unnormalized taps ``1 / (1 + (l - 5)**2)``, ``l = 0..10``."""
    l = np.arange(11)
    return 1.0 / (1.0 + (l - 5.0) ** 2)


def _normalized_taps(g):
    g = np.asarray(g, dtype=complex).ravel()
    if g.size == 0:
        raise InvalidArgumentError("empty FIR coefficient sequence")
    energy = np.sum(np.abs(g) ** 2)
    if energy == 0:
        raise InvalidArgumentError("FIR coefficients are all zero")
    return g / np.sqrt(energy)


def fir_matrix(g, N_t):
    """Circulant ``N_t x N_t`` matrix of the power-normalized taps ``g``.

    Taps longer than ``N_t`` wrap around circularly.
    """
    g = _normalized_taps(g)
    col = np.zeros(N_t, dtype=complex)
    np.add.at(col, np.arange(g.size) % N_t, g)
    return circulant(col)


def fir_channel(g, N_t, ordered=False):
    """Channel instance of a circulant FIR filter, ``sum |g_l|^2 = 1``."""
    return ChannelInstance.from_matrix(fir_matrix(g, N_t), ordered=ordered)


def selective_channel(N_t, L, rng, ordered=False):
    """Time- and frequency-selective channel ``H = A G``.

    ``A = diag(a_1..a_N)`` with ``a_i ~ CN(0, 1)`` drawn from ``rng`` and
    ``G`` the circulant FIR matrix of taps ``2**-l``, ``l = 0..L``.
    """
    if not 0 <= L <= N_t - 1:
        raise InvalidArgumentError(f"need 0 <= L <= N_t - 1, got L={L}, N_t={N_t}")
    a = complex_normal(rng, N_t)
    G = fir_matrix(2.0 ** -np.arange(L + 1), N_t)
    return ChannelInstance.from_matrix(a[:, None] * G, ordered=ordered)


def draw_input(constellation, N_t, rho, rng):
    """Draw i.u.d. symbol indices; returns ``(indices, sqrt(rho) * s)``."""
    idx = rng.integers(0, constellation.M, size=N_t)
    return idx, constellation.scaled(rho)[idx]


def synthesize(channel, d, rng):
    """Return ``(z, n)`` with ``z = H d + n`` and ``n ~ CN(0, I)``."""
    H = channel.H if isinstance(channel, ChannelInstance) else np.asarray(channel)
    n = complex_normal(rng, H.shape[0])
    return H @ d + n, n
