"""How the two tree searches turn into density bounds.

One received vector of a 4x4 4-QAM system (256 mixture components). The
depth-first search keeps every leaf inside a sphere around the zero-forcing
point; the K-best search keeps the K cheapest partial paths per level. Both
give a lower density (kept leaves only) and an upper density (kept leaves
plus the mass of everything cut), which bracket the exact mixture density.
"""

import math

import numpy as np

from sdentropy import (
    ChannelInstance, SearchParams, log_density_bounds, make_constellation, run_search,
    true_log_density,
)
from sdentropy.rng import complex_normal

rng = np.random.default_rng(5)
qam = make_constellation("qam", 4)
rho = 10 ** (6 / 10)
ch = ChannelInstance.from_matrix(complex_normal(rng, (4, 4)) / 2, ordered=True)
d = qam.scaled(rho)[rng.integers(0, 4, 4)]
z = ch.H @ d + complex_normal(rng, 4)
v = ch.rotate(z)

exact = true_log_density(ch, qam, rho, z)
print(f"exact log f(z) = {exact:.6f}  ({qam.M ** 4} components)\n")
print(f"{'search':<18}{'leaves':>7}{'nodes':>7}{'log f_lo':>12}{'log f_up+':>12}{'log f_up':>12}")
for s in [SearchParams("dfs", alpha=a) for a in (1.0, 1.5, 3.0, math.inf)] + [
        SearchParams("bfs", K=K) for K in (1, 4, 16, 64)]:
    cs = run_search(v, ch.R, s, qam, rho)
    t = log_density_bounds(cs, qam.M, 4)
    name = ",".join(f"{k}={v}" for k, v in s.describe().items() if k != "mode")
    name = f"{s.mode} {name}"
    tail = "-" if t.log_f_upper_tail is None else f"{t.log_f_upper_tail:.6f}"
    print(f"{name:<18}{cs.size:>7}{cs.visited_nodes:>7}{t.log_f_lower:12.6f}"
          f"{t.log_f_upper_pruned:12.6f}{tail:>12}")
