"""Small helpers shared by the demo scripts."""

import os
import sys

from sdentropy.harness import load_config, run_experiment

CONFIGS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")


def config(name, **over):
    cfg = load_config(os.path.join(CONFIGS, f"{name}.json"))
    for k, v in over.items():
        setattr(cfg, k, v)
    return cfg


def label(row):
    p = {k: v for k, v in row.params.items() if k != "status"}
    extra = ",".join(f"{k}={v}" for k, v in sorted(p.items()))
    name = row.method + (f"({extra})" if extra else "")
    if row.bound_kind not in ("exact", "approx", "trivial"):
        name += f" {row.bound_kind}"
    return name


def mi_table(rows, out=sys.stdout):
    """Print bits/symbol with one column per SNR."""
    snrs = sorted({r.snr_db for r in rows})
    labels = []
    cell = {}
    for r in rows:
        lab = label(r)
        if lab not in labels:
            labels.append(lab)
        cell[lab, r.snr_db] = r.mi_bits_per_symbol
    width = max(len(s) for s in labels) + 2
    print("".ljust(width) + "".join(f"{s:>8g}" for s in snrs), file=out)
    for lab in labels:
        vals = [cell.get((lab, s)) for s in snrs]
        print(lab.ljust(width) + "".join("       -" if v is None else f"{v:8.3f}"
                                        for v in vals), file=out)


def nodes_table(rows, methods, out=sys.stdout):
    snrs = sorted({r.snr_db for r in rows})
    seen = {}
    for r in rows:
        if r.method in methods and r.bound_kind in ("upper", "approx", "exact"):
            seen.setdefault(label(r).replace(" upper", ""), {})[r.snr_db] = r.mean_visited_nodes
    width = max(len(s) for s in seen) + 2
    print("".ljust(width) + "".join(f"{s:>9g}" for s in snrs), file=out)
    for lab, vals in seen.items():
        print(lab.ljust(width) + "".join(f"{vals.get(s, float('nan')):9.0f}" for s in snrs),
              file=out)


def run(cfg, threads=None):
    return run_experiment(cfg, threads=threads)
