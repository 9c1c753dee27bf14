"""Convergence of the sphere-decoder bounds at SNR = -2.5 dB.

On the memory-10 channel the upper and enhanced lower entropy bounds close
in on the exhaustive entropy as the radius factor alpha or the K-best width
grows, and meet it at alpha = inf and K = 2**10 (full tree). The upper bound
is the tighter of the two throughout.
"""

import argparse
import math

from _common import config
from sdentropy.harness import sweep_convergence

ap = argparse.ArgumentParser()
ap.add_argument("--quick", action="store_true")
args = ap.parse_args()

cfg = config("fig6")
if args.quick:
    cfg.N_d, cfg.N_n = 20, 10
for param, grid in (("alpha", [1, 1.25, 1.5, 2, 3, math.inf]),
                    ("k", [2 ** j for j in range(11)])):
    rows = sweep_convergence(cfg, param, grid)
    h = rows[0].h_true
    print(f"\n{param:>6} {'h_up - h':>10} {'h - h_lo+':>10} {'nodes':>8}   (h = {h:.4f} bits)")
    for r in rows:
        print(f"{r.value:>6g} {r.h_up - h:10.4f} {h - r.h_lo_plus:10.4f} {r.mean_visited_nodes:8.0f}")
