"""Memory-10 FIR channel with binary input, N_t = 11.

Mutual information of the sphere-decoder upper bounds (DFS alpha = 1, 1.5
and BFS K = 50), the BCJR rates with the full trellis and with Q = 100
states, the SA and HD1 approximations and the two trivial bounds, against
the exhaustive mixture (2048 components). The second table lists the
visited nodes (or trellis states).

``--quick`` uses three SNR points and fewer Monte-Carlo draws; the full
config takes several minutes.
"""

import argparse

from _common import config, mi_table, nodes_table, run

ap = argparse.ArgumentParser()
ap.add_argument("--quick", action="store_true")
ap.add_argument("--threads", type=int)
args = ap.parse_args()

cfg = config("fig5")
if args.quick:
    cfg.snr_db = [-5.0, 0.0, 5.0]
    cfg.N_d, cfg.N_n = 20, 10
    for m in cfg.methods:
        if m["name"] == "bcjr":
            m["n"] = 5000
rows = run(cfg, args.threads)
print("mutual information [bits/symbol]")
mi_table(rows)
print("\nmean visited nodes / states")
nodes_table(rows, ("dfs", "bfs", "bcjr"))
