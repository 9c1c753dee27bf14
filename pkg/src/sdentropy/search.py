"""Sphere-decoder tree searches over an upper-triangular system ``v ~ R d``.

The tree is built from the last row of ``R`` upwards: depth ``k`` fixes the
symbols of rows ``N-k .. N-1`` (0-based). Both searches return every leaf
they keep together with the mass of everything they discarded, which is what
the entropy bounds need.

The fixed-radius search never shrinks its radius, so the set of expanded
nodes does not depend on the traversal order. It is therefore evaluated one
depth at a time with numpy; the visited set, candidates and pruned mass are
the same as those of a recursive depth-first traversal.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import InvalidArgumentError, SearchSizeError
from .logsum import logsumexp

__all__ = [
    "CandidateSet",
    "SearchParams",
    "cost_step",
    "path_cost",
    "babai_indices",
    "babai_anchor",
    "anchor_radius",
    "dfs_search",
    "bfs_search",
    "run_search",
    "complexity_C",
    "k_for_budget",
    "MAX_LIVE_PATHS",
]

# Fixed-radius search guard: with a weak row inside the searched block the
# number of in-radius partial paths can grow like M**depth.
MAX_LIVE_PATHS = 2 ** 18


@dataclass(frozen=True)
class CandidateSet:
    """Leaves kept by a tree search, sorted by distance.

    Attributes
    ----------
    indices : (N, n) ndarray of int
        Constellation indices of each kept symbol vector, in ``R`` column
        order.
    distances : (N,) ndarray
        ``||v - R d||**2`` accumulated along each path.
    log_pruned_mass : float
        ``log sum exp(-c) * M**(n - k)`` over all subtrees cut at depth ``k``
        with cost ``c``; ``-inf`` if nothing was cut.
    visited_nodes : int
        Number of tree nodes whose cost was evaluated.
    radius_sq : float
        Squared sphere radius (``inf`` for the K-best search).
    mode : str
        ``'dfs'`` or ``'bfs'``.
    M : int
        Constellation size.
    """

    indices: np.ndarray
    distances: np.ndarray
    log_pruned_mass: float
    visited_nodes: int
    radius_sq: float
    mode: str
    M: int

    @property
    def n(self):
        return self.indices.shape[1]

    @property
    def size(self):
        return self.distances.size

    @property
    def pruned_mass(self):
        return math.exp(self.log_pruned_mass)

    @property
    def n_missing(self):
        """Number of leaves not in the set (exact integer)."""
        return self.M ** self.n - self.size

    def symbols(self, constellation, rho):
        return constellation.scaled(rho)[self.indices]


@dataclass(frozen=True)
class SearchParams:
    """Search configuration.

    ``mode='dfs'`` uses the radius ``alpha * ||v - R d0||**2`` around the
    Babai point ``d0``; ``mode='bfs'`` keeps the ``K`` best partial paths per
    depth, with ``K`` taken from ``budget`` (visited-node budget) if given.
    """

    mode: str = "dfs"
    alpha: float = 1.0
    K: int = None
    budget: int = None

    def __post_init__(self):
        if self.mode not in ("dfs", "bfs"):
            raise InvalidArgumentError(f"unknown search mode {self.mode!r}")
        if self.mode == "dfs" and not self.alpha >= 1.0:
            raise InvalidArgumentError(f"alpha must be >= 1, got {self.alpha}")
        if self.mode == "bfs":
            if self.K is None and self.budget is None:
                raise InvalidArgumentError("bfs needs K or a budget")
            if self.K is not None and int(self.K) < 1:
                raise InvalidArgumentError(f"K must be >= 1, got {self.K}")

    def resolve_K(self, M, n):
        if self.K is not None:
            return int(self.K)
        return k_for_budget(self.budget, M, n)

    def describe(self):
        if self.mode == "dfs":
            return {"mode": "dfs", "alpha": self.alpha}
        if self.K is not None:
            return {"mode": "bfs", "K": int(self.K)}
        return {"mode": "bfs", "budget": int(self.budget)}


def _expand(v_i, r_tail, r_ii, sp, path_vals, costs):
    """Costs of all children of the given partial paths at row ``i``.

    ``path_vals`` holds the symbol values of rows ``i+1..n-1``. Returns a
    ``(P, M)`` array of accumulated costs.
    """
    # column-by-column accumulation: the rounding of each path's cost must
    # not depend on how many paths are expanded together
    interference = np.zeros(path_vals.shape[0], dtype=complex)
    for j in range(path_vals.shape[1]):
        interference += path_vals[:, j] * r_tail[j]
    u = (v_i - interference)[:, None] - r_ii * sp[None, :]
    return costs[:, None] + (u.real ** 2 + u.imag ** 2)


def cost_step(c_prev, v, R, k, partial_d):
    """One step of the cost recursion.

    Parameters
    ----------
    c_prev : float
        Cost of the parent node at depth ``k - 1`` (0 at the root).
    v : (n,) array_like
    R : (n, n) array_like
    k : int
        Depth of the new node, ``1 <= k <= n``.
    partial_d : (k,) array_like
        Symbol values of rows ``n-k .. n-1``; the first entry is the new one.

    Returns
    -------
    float
        ``c_prev + |v_i - sum_{j >= i} r_ij d_j|**2`` with ``i = n - k``.
    """
    v = np.asarray(v, dtype=complex)
    R = np.asarray(R, dtype=complex)
    n = v.size
    i = n - k
    partial_d = np.asarray(partial_d, dtype=complex)
    c = _expand(
        v[i], R[i, i + 1:], R[i, i], partial_d[:1], partial_d[None, 1:],
        np.array([float(c_prev)]),
    )
    return float(c[0, 0])


def path_cost(v, R, idx, sp):
    """Accumulated cost of a complete index path, same arithmetic as the searches."""
    n = v.size
    c = np.zeros(1)
    vals = np.zeros((1, 0), dtype=complex)
    for i in range(n - 1, -1, -1):
        child = _expand(v[i], R[i, i + 1:], R[i, i], sp, vals, c)
        c = child[:, idx[i]]
        vals = np.concatenate([sp[idx[i:i + 1]][None, :], vals], axis=1)
    return float(c[0])


def babai_indices(v, R, constellation, rho):
    """Quantized zero-forcing point of ``v = R d`` (indices in ``R`` order)."""
    x = solve_triangular(R, v, lower=False, check_finite=False)
    return constellation.nearest(x, rho)


def babai_anchor(channel, z, constellation, rho):
    """Zero-forcing estimate ``H^+ z`` quantized to the scaled constellation.

    Returns the symbol vector in the original (unpermuted) coordinates.
    """
    idx = babai_indices(channel.rotate(z), channel.R, constellation, rho)
    return constellation.scaled(rho)[channel.from_tree(idx)]


def anchor_radius(v, R, constellation, rho, alpha):
    """``(alpha * ||v - R d0||**2, d0)`` for the Babai point ``d0``."""
    idx0 = babai_indices(v, R, constellation, rho)
    if math.isinf(alpha):
        return math.inf, idx0
    return alpha * path_cost(v, R, idx0, constellation.scaled(rho)), idx0


def _lex_order(paths, costs):
    """Sort by cost, ties by the index tuple (row 0 most significant)."""
    keys = [paths[:, c] for c in range(paths.shape[1] - 1, -1, -1)]
    keys.append(costs)
    return np.lexsort(keys)


def _finish(paths, costs, pruned, visited, radius_sq, mode, M):
    order = _lex_order(paths, costs)
    lpm = logsumexp(np.concatenate(pruned)) if pruned else -math.inf
    return CandidateSet(
        indices=paths[order],
        distances=costs[order],
        log_pruned_mass=float(lpm),
        visited_nodes=int(visited),
        radius_sq=float(radius_sq),
        mode=mode,
        M=M,
    )


def dfs_search(v, R, zeta_sq, constellation, rho, max_paths=None):
    """Fixed-radius sphere search.

    Returns every symbol vector with ``||v - R d||**2 <= zeta_sq``. Each
    subtree cut at depth ``k`` with cost ``c`` adds ``exp(-c) * M**(n-k)`` to
    the pruned mass.

    Raises
    ------
    SearchSizeError
        If more than ``max_paths`` (default :data:`MAX_LIVE_PATHS`) partial
        paths are inside the radius at some depth.
    """
    max_paths = MAX_LIVE_PATHS if max_paths is None else int(max_paths)
    v = np.asarray(v, dtype=complex)
    R = np.asarray(R, dtype=complex)
    n = v.size
    M = constellation.M
    sp = constellation.scaled(rho)
    log_M = math.log(M)

    paths = np.zeros((1, 0), dtype=np.intp)
    costs = np.zeros(1)
    pruned = []
    visited = 0
    for i in range(n - 1, -1, -1):
        k = n - i
        child = _expand(v[i], R[i, i + 1:], R[i, i], sp, sp[paths], costs)
        visited += child.size
        keep = child <= zeta_sq
        if not keep.all():
            pruned.append((n - k) * log_M - child[~keep])
        pi, mi = np.nonzero(keep)
        if pi.size > max_paths:
            raise SearchSizeError(int(pi.size), max_paths)
        paths = np.concatenate([mi[:, None], paths[pi]], axis=1)
        costs = child[pi, mi]
        if costs.size == 0:
            paths = np.zeros((0, n), dtype=np.intp)
            break
    return _finish(paths, costs, pruned, visited, zeta_sq, "dfs", M)


def bfs_search(v, R, K, constellation, rho):
    """K-best breadth-first search.

    At every depth ``k < n`` the ``min(K, M**k)`` cheapest partial paths
    survive; all children of the survivors at the last depth are returned.
    Each discarded partial path adds ``exp(-c) * M**(n-k)`` to the pruned
    mass.
    """
    K = int(K)
    if K < 1:
        raise InvalidArgumentError(f"K must be >= 1, got {K}")
    v = np.asarray(v, dtype=complex)
    R = np.asarray(R, dtype=complex)
    n = v.size
    M = constellation.M
    sp = constellation.scaled(rho)
    log_M = math.log(M)

    paths = np.zeros((1, 0), dtype=np.intp)
    costs = np.zeros(1)
    pruned = []
    visited = 0
    for i in range(n - 1, -1, -1):
        k = n - i
        child = _expand(v[i], R[i, i + 1:], R[i, i], sp, sp[paths], costs)
        visited += child.size
        P = child.shape[0]
        pi = np.repeat(np.arange(P), M)
        mi = np.tile(np.arange(M), P)
        paths = np.concatenate([mi[:, None], paths[pi]], axis=1)
        costs = child.ravel()
        if k < n and costs.size > K:
            order = _lex_order(paths, costs)
            cut = order[K:]
            pruned.append((n - k) * log_M - costs[cut])
            order = order[:K]
            paths, costs = paths[order], costs[order]
    return _finish(paths, costs, pruned, visited, math.inf, "bfs", M)


def run_search(v, R, params, constellation, rho):
    """Dispatch on ``params.mode``; DFS radius is anchored at the Babai point."""
    if params.mode == "dfs":
        zeta_sq, _ = anchor_radius(v, R, constellation, rho, params.alpha)
        return dfs_search(v, R, zeta_sq, constellation, rho)
    K = params.resolve_K(constellation.M, v.size)
    return bfs_search(v, R, K, constellation, rho)


def _k0(K, M, n):
    """``max{k <= n : M**(k-1) < K}`` (0 when no such k)."""
    k0 = 0
    while k0 < n and M ** k0 < K:
        k0 += 1
    return k0


def complexity_C(K, M_c, N_t):
    """Visited nodes of the K-best search.

    ``sum_{k<=k0} M**k + (N_t - k0) * M * K`` with
    ``k0 = max{k : M**(k-1) < K}`` (capped at ``N_t``).
    """
    K, M, n = int(K), int(M_c), int(N_t)
    if K < 1:
        raise InvalidArgumentError(f"K must be >= 1, got {K}")
    k0 = _k0(K, M, n)
    return M * (M ** k0 - 1) // (M - 1) + (n - k0) * M * K


def k_for_budget(C0, M_c, N_t):
    """Largest-``k0`` self-consistent solution of ``C(K) = C0`` for ``K``.

    Returns ``M**(N_t - 1)`` (full search) once ``C0`` covers the full tree.
    """
    C0, M, n = int(C0), int(M_c), int(N_t)
    full = M * (M ** n - 1) // (M - 1)
    minimum = complexity_C(1, M, n)
    if C0 < minimum:
        raise InvalidArgumentError(
            f"budget {C0} below the minimum {minimum} visited nodes"
        )
    if C0 >= full:
        return M ** (n - 1)
    for k0 in range(n - 1, -1, -1):
        head = (M ** k0 - 1) // (M - 1)
        # exact integer floor of (C0 / M - head) / (n - k0)
        K = (C0 - M * head) // (M * (n - k0))
        if K >= 1 and _k0(K, M, n) == k0:
            return K
    return 1
