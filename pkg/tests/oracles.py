"""Slow, obviously-correct reference implementations used by the tests.

Nothing here shares arithmetic with the library beyond numpy itself.
"""

import itertools
import math

import numpy as np


def all_index_vectors(M, n):
    return np.array(list(itertools.product(range(M), repeat=n)), dtype=np.intp).reshape(-1, n)


def brute_distances(v, R, sp):
    """``||v - R d||**2`` for every index vector, in itertools order."""
    idx = all_index_vectors(sp.size, v.size)
    diff = v[None, :] - sp[idx] @ R.T
    return idx, np.sum(np.abs(diff) ** 2, axis=1)


def brute_in_radius(v, R, sp, zeta_sq):
    idx, D = brute_distances(v, R, sp)
    keep = D <= zeta_sq
    return {tuple(row) for row in idx[keep]}, idx, D


def brute_log_density(z, H, sp):
    """Exact mixture log density straight from the definition."""
    n = H.shape[0]
    M = sp.size
    terms = []
    for idx in itertools.product(range(M), repeat=n):
        r = z - H @ sp[list(idx)]
        terms.append(-float(np.vdot(r, r).real))
    terms = np.array(terms)
    m = terms.max()
    return -n * math.log(math.pi * M) + m + math.log(np.exp(terms - m).sum())


def recursive_dfs(v, R, sp, zeta_sq, with_paths=False):
    """Literal depth-first sphere search.

    Returns ``(leaves, pruned_terms, visited)`` where ``leaves`` maps index
    tuples to distances and ``pruned_terms`` lists ``(cost, depth)`` of every
    subtree cut, or ``(cost, depth, path)`` with ``with_paths``.
    """
    n = v.size
    M = sp.size
    leaves = {}
    pruned = []
    visited = [0]

    def descend(i, chosen, cost):
        # chosen holds indices of rows i+1..n-1
        for m in range(M):
            vals = [sp[m]] + [sp[c] for c in chosen]
            u = v[i] - sum(R[i, i + j] * vals[j] for j in range(len(vals)))
            c = cost + abs(u) ** 2
            visited[0] += 1
            path = [m] + chosen
            if c > zeta_sq:
                pruned.append((c, n - i, tuple(path)) if with_paths else (c, n - i))
            elif i == 0:
                leaves[tuple(path)] = c
            else:
                descend(i - 1, path, c)

    descend(n - 1, [], 0.0)
    return leaves, pruned, visited[0]


def kbest_reference(v, R, sp, K):
    """Plain-python K-best with (cost, index tuple) ordering."""
    n = v.size
    M = sp.size
    paths = [((), 0.0)]
    visited = 0
    for i in range(n - 1, -1, -1):
        children = []
        for path, cost in paths:
            for m in range(M):
                full = (m,) + path
                vals = [sp[c] for c in full]
                u = v[i] - sum(R[i, i + j] * vals[j] for j in range(len(vals)))
                children.append((full, cost + abs(u) ** 2))
                visited += 1
        children.sort(key=lambda t: (t[1], t[0]))
        paths = children if i == 0 else children[:K]
    return paths, visited
