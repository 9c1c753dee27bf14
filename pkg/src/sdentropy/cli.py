"""Command-line front end: ``sdentropy run`` and ``sdentropy sweep``.

Exit codes: 0 success, 2 configuration error, 3 numeric-domain error.
"""

import argparse
import contextlib
import csv
import sys

from .errors import InvalidArgumentError, NumericDomainError, SingularMatrixError
from .harness import (
    CSV_COLUMNS, SWEEP_COLUMNS, ConfigError, load_config, run_experiment,
    sweep_convergence, write_metadata, write_rows,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _floats(text):
    text = text.strip()
    if not text:
        return []
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _apply_overrides(cfg, args):
    if args.seed is not None:
        cfg.seed = args.seed
    if getattr(args, "out", None):
        cfg.output = args.out
    if getattr(args, "snr_db", None) is not None:
        cfg.snr_db = _floats(args.snr_db)
    if getattr(args, "method", None):
        keep = set(args.method.split(","))
        cfg.methods = [m for m in cfg.methods if m["name"] in keep]
        if not cfg.methods:
            raise ConfigError(f"method filter {args.method!r} matches nothing")
    if getattr(args, "timing", False):
        cfg.record_timing = True
    cfg.validate()
    return cfg


@contextlib.contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _cmd_run(args):
    cfg = _apply_overrides(load_config(args.config), args)
    with _open_out(cfg.output) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        fh.flush()

        def sink(row):
            writer.writerow(row.csv_values(cfg.record_timing))
            fh.flush()
            print(f"{row.snr_db:g} dB {row.method} {row.bound_kind} done", file=sys.stderr)

        rows = run_experiment(cfg, sink=sink, threads=args.threads)
    if cfg.output and cfg.output != "-":
        write_metadata(cfg.output + ".meta.json", cfg, rows)
    return EXIT_OK


def _cmd_sweep(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    grid = [g.strip() for g in args.grid.split(",") if g.strip()]
    if not grid:
        raise ConfigError("empty grid")
    snr = None
    if args.snr_db is not None:
        pts = _floats(args.snr_db)
        if len(pts) != 1:
            raise ConfigError("sweep takes a single SNR point")
        snr = pts[0]
    rows = sweep_convergence(cfg, args.param, grid, snr_db=snr, threads=args.threads)
    out = args.out or cfg.output
    with _open_out(out) as fh:
        write_rows(rows, fh, SWEEP_COLUMNS)
    if out and out != "-":
        write_metadata(out + ".meta.json", cfg, rows, {"sweep": {"param": args.param, "grid": grid}})
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="sdentropy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run every method of a config over its SNR grid")
    run.add_argument("--config", required=True)
    run.add_argument("--out", help="CSV path (default: config output, else stdout)")
    run.add_argument("--seed", type=int)
    run.add_argument("--threads", type=int, help="worker threads (default: $SDENTROPY_THREADS or 1)")
    run.add_argument("--snr-db", help="comma list overriding the config SNR grid")
    run.add_argument("--method", help="comma list of method names to keep")
    run.add_argument("--timing", action="store_true", help="fill the wall_ms column")
    run.set_defaults(func=_cmd_run)

    sw = sub.add_parser("sweep", help="bounds versus alpha or K at one SNR")
    sw.add_argument("--config", required=True)
    sw.add_argument("--param", required=True, choices=("alpha", "k"))
    sw.add_argument("--grid", required=True, help="comma list, 'inf' allowed for alpha")
    sw.add_argument("--out")
    sw.add_argument("--seed", type=int)
    sw.add_argument("--threads", type=int)
    sw.add_argument("--snr-db", help="SNR point (default: first SNR of the config)")
    sw.set_defaults(func=_cmd_sweep)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.threads is not None and args.threads < 1:
        print("sdentropy: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (NumericDomainError, SingularMatrixError) as exc:
        print(f"sdentropy: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"sdentropy: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
