"""Max-shifted log-domain accumulation."""

import math

import numpy as np

LOG2E = 1.0 / math.log(2.0)


def logsumexp(a):
    """``log(sum(exp(a)))`` of a 1-D array; ``-inf`` for empty or all ``-inf``."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return -math.inf
    m = a.max()
    if not np.isfinite(m):
        return float(m)
    return float(m + math.log(np.sum(np.exp(a - m))))


def logaddexp(a, b):
    return float(np.logaddexp(a, b))
