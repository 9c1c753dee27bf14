"""Declarative SNR sweeps over estimators with CSV output.

A config is a JSON document::

    {
      "version": 1,
      "channel": {"family": "fir", "taps": "memory10", "N_t": 11},
      "constellation": {"kind": "binary", "M_c": 2},
      "snr_db": [-10, -7.5, -5],
      "methods": [{"name": "truth"}, {"name": "dfs", "alpha": 1.5},
                  {"name": "bfs", "K": 50}, {"name": "bcjr", "n": 50000, "Q": 100}],
      "N_d": 100, "N_n": 50, "seed": 1
    }

Channel families: ``fir`` (``taps`` list or ``"memory10"``, ``N_t``) and
``selective`` (``N_t``, ``L``, ``seed``). Methods: ``truth``, ``dfs``
(``alpha``), ``bfs`` (``K`` or ``budget``), ``sdea`` (``alpha`` or
``K``/``budget``; ``gamma_l_db``/``gamma_h_db`` or ``delta_gamma`` with
optional ``gamma_c``; optional ``rho_ref_db``), ``sa``, ``hd1``, ``bcjr``
(``n``, optional ``Q``), ``gb``, ``seb``.
"""

import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass

from . import __version__
from .baselines import bcjr_mi, hd1_mi, sa_mi, trellis_complexity
from .errors import InvalidArgumentError, OracleSizeError, SearchSizeError
from .estimators import (
    DEFAULT_ORACLE_CAP, gaussian_bound, mc_entropy, noise_entropy_bits, rho_c, seb,
    true_entropy_oracle,
)
from .model import fir_channel, make_constellation, memory10_taps, selective_channel
from .rng import CHANNEL_STREAM, stream
from .sdea import choose_thresholds, sdea_mi
from .search import SearchParams, complexity_C

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ResultRow",
    "SweepRow",
    "CSV_COLUMNS",
    "SWEEP_COLUMNS",
    "load_config",
    "build_channel",
    "run_experiment",
    "sweep_convergence",
    "write_rows",
]

CONFIG_VERSION = 1
METHODS = ("truth", "dfs", "bfs", "sdea", "sa", "hd1", "bcjr", "gb", "seb")
CSV_COLUMNS = (
    "snr_db", "method", "params", "mi_bits_per_symbol", "mi_bits_total",
    "h_bits", "bound_kind", "mean_visited_nodes", "stderr", "n_sentinels",
    "wall_ms",
)
SWEEP_COLUMNS = (
    "param", "value", "snr_db", "h_up", "h_lo", "h_lo_plus", "h_true",
    "mean_visited_nodes",
)


class ConfigError(InvalidArgumentError):
    """The experiment description is malformed."""


def _number(x, what):
    if isinstance(x, str) and x.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return float(x)
    except (TypeError, ValueError):
        raise ConfigError(f"{what}: expected a number, got {x!r}") from None


def _int(x, what):
    if isinstance(x, bool) or not isinstance(x, (int, float, str)):
        raise ConfigError(f"{what}: expected an integer, got {x!r}")
    try:
        v = int(x)
    except ValueError:
        raise ConfigError(f"{what}: expected an integer, got {x!r}") from None
    if isinstance(x, float) and v != x:
        raise ConfigError(f"{what}: expected an integer, got {x!r}")
    return v


def _search_from(spec, where):
    if "alpha" in spec:
        alpha = _number(spec["alpha"], f"{where}.alpha")
        if not alpha >= 1:
            raise ConfigError(f"{where}.alpha must be >= 1")
        return SearchParams("dfs", alpha=alpha)
    if "K" in spec:
        K = int(spec["K"])
        if K < 1:
            raise ConfigError(f"{where}.K must be >= 1")
        return SearchParams("bfs", K=K)
    if "budget" in spec:
        return SearchParams("bfs", budget=int(spec["budget"]))
    raise ConfigError(f"{where} needs alpha, K or budget")


def _validate_method(m, i):
    where = f"methods[{i}]"
    if not isinstance(m, dict) or "name" not in m:
        raise ConfigError(f"{where} must be an object with a name")
    name = m["name"]
    if name not in METHODS:
        raise ConfigError(f"{where}: unknown method {name!r}")
    if name in ("dfs", "bfs", "sdea"):
        s = _search_from(m, where)
        if name == "dfs" and s.mode != "dfs" or name == "bfs" and s.mode != "bfs":
            raise ConfigError(f"{where}: {name} needs {'alpha' if name == 'dfs' else 'K or budget'}")
    if name == "sdea":
        explicit = "gamma_l_db" in m and "gamma_h_db" in m
        if not explicit and "delta_gamma" not in m:
            raise ConfigError(f"{where}: sdea needs gamma_l_db/gamma_h_db or delta_gamma")
        if explicit and m["gamma_l_db"] > m["gamma_h_db"]:
            raise ConfigError(f"{where}: gamma_l_db exceeds gamma_h_db")
    if name == "bcjr":
        if int(m.get("n", 0)) < 1:
            raise ConfigError(f"{where}: bcjr needs a positive sequence length n")
        if m.get("Q") is not None and int(m["Q"]) < 1:
            raise ConfigError(f"{where}: Q must be >= 1")


@dataclass
class ExperimentConfig:
    channel: dict
    constellation: dict
    snr_db: list
    methods: list
    N_d: int = 100
    N_n: int = 50
    seed: int = 0
    output: str = None
    oracle_cap: int = DEFAULT_ORACLE_CAP
    record_timing: bool = False
    version: int = CONFIG_VERSION

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        if d.get("version") != CONFIG_VERSION:
            raise ConfigError(f"unsupported config version {d.get('version')!r}")
        for key in ("channel", "constellation", "snr_db", "methods"):
            if key not in d:
                raise ConfigError(f"missing key {key!r}")
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown keys {sorted(extra)}")
        try:
            cfg = cls(**d)
            cfg.validate()
        except ConfigError:
            raise
        except (TypeError, ValueError, KeyError, AttributeError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        return cfg

    def validate(self):
        if not isinstance(self.snr_db, list):
            raise ConfigError("snr_db must be a list")
        self.snr_db = [_number(s, "snr_db") for s in self.snr_db]
        if int(self.N_d) < 1 or int(self.N_n) < 1:
            raise ConfigError("N_d and N_n must be >= 1")
        if not isinstance(self.methods, list):
            raise ConfigError("methods must be a list")
        for i, m in enumerate(self.methods):
            _validate_method(m, i)
        fam = self.channel.get("family")
        if fam not in ("fir", "selective"):
            raise ConfigError(f"unknown channel family {fam!r}")
        if "N_t" not in self.channel:
            raise ConfigError("channel.N_t is required")
        N_t = _int(self.channel["N_t"], "channel.N_t")
        if N_t < 1:
            raise ConfigError("channel.N_t must be >= 1")
        if fam == "selective":
            if "L" not in self.channel:
                raise ConfigError("selective channel needs L")
            if not 0 <= _int(self.channel["L"], "channel.L") <= N_t - 1:
                raise ConfigError("selective channel needs 0 <= L <= N_t - 1")
            _int(self.channel.get("seed", 0), "channel.seed")
        else:
            fir_taps(self.channel)
        if any(m["name"] == "bcjr" for m in self.methods) and fam != "fir":
            raise ConfigError("bcjr needs a time-invariant fir channel")
        try:
            self.make_constellation()
        except InvalidArgumentError as exc:
            raise ConfigError(str(exc)) from exc

    def make_constellation(self):
        return make_constellation(self.constellation.get("kind"), self.constellation.get("M_c"))

    def to_dict(self):
        return asdict(self)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return ExperimentConfig.from_dict(data)


def fir_taps(channel_spec):
    taps = channel_spec.get("taps", "memory10")
    if taps == "memory10":
        return memory10_taps()
    if isinstance(taps, list) and taps:
        try:
            return [complex(*t) if isinstance(t, list) else complex(t) for t in taps]
        except (TypeError, ValueError):
            pass
    raise ConfigError(f"bad taps {taps!r}; use a list of numbers or [re, im] pairs")


def build_channel(channel_spec, ordered=False):
    N_t = int(channel_spec["N_t"])
    if channel_spec["family"] == "fir":
        return fir_channel(fir_taps(channel_spec), N_t, ordered=ordered)
    rng = stream(int(channel_spec.get("seed", 0)), CHANNEL_STREAM)
    return selective_channel(N_t, int(channel_spec["L"]), rng, ordered=ordered)


@dataclass
class ResultRow:
    snr_db: float
    method: str
    params: dict
    mi_bits_per_symbol: float
    mi_bits_total: float
    h_bits: float
    bound_kind: str
    mean_visited_nodes: float
    stderr: float
    n_sentinels: int = 0
    wall_ms: float = None

    def csv_values(self, timing):
        def num(x):
            if x is None:
                return ""
            return repr(float(x))

        return [
            num(self.snr_db), self.method,
            json.dumps(self.params, sort_keys=True, separators=(",", ":")),
            num(self.mi_bits_per_symbol), num(self.mi_bits_total), num(self.h_bits),
            self.bound_kind, num(self.mean_visited_nodes), num(self.stderr),
            str(int(self.n_sentinels)),
            num(self.wall_ms) if timing else "",
        ]


@dataclass
class SweepRow:
    param: str
    value: float
    snr_db: float
    h_up: float
    h_lo: float
    h_lo_plus: float
    h_true: float
    mean_visited_nodes: float

    def csv_values(self, timing=False):
        return ["" if x is None else (repr(float(x)) if not isinstance(x, str) else x)
                for x in (self.param, self.value, self.snr_db, self.h_up, self.h_lo,
                          self.h_lo_plus, self.h_true, self.mean_visited_nodes)]


def _warn(msg):
    print(f"sdentropy: {msg}", file=sys.stderr)


class _Context:
    """Channel objects shared by all methods of one experiment."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.const = cfg.make_constellation()
        self.channel = build_channel(cfg.channel)
        self.N_t = self.channel.N_t
        self._sorted = None
        self._rho_c = None

    @property
    def sorted_channel(self):
        if self._sorted is None:
            self._sorted = self.channel.reordered()
        return self._sorted

    @property
    def rho_c(self):
        if self._rho_c is None:
            self._rho_c = rho_c(self.channel, self.const)
        return self._rho_c


def _row(snr, method, params, mi_total, h_total, kind, nodes, stderr, n_sent, N_t):
    per = None if mi_total is None else mi_total / N_t
    return ResultRow(snr, method, params, per, mi_total, h_total, kind, nodes, stderr, n_sent)


def _sdea_thresholds(m, ctx):
    if "gamma_l_db" in m:
        return 10 ** (m["gamma_l_db"] / 10), 10 ** (m["gamma_h_db"] / 10)
    gc = m.get("gamma_c")
    gl, gh, degenerate = choose_thresholds(ctx.sorted_channel.lambda_sq, float(m["delta_gamma"]), gc)
    if degenerate:
        _warn("all stream gains equal; sdea thresholds collapse to gamma_c")
    return gl, gh


def _run_method(m, snr, ctx, threads):
    cfg = ctx.cfg
    name = m["name"]
    rho = 10 ** (snr / 10)
    N_t, const = ctx.N_t, ctx.const
    params = {k: v for k, v in m.items() if k != "name"}
    hn = noise_entropy_bits(N_t)
    args = (cfg.N_d, cfg.N_n, cfg.seed)

    if name == "gb":
        gb = gaussian_bound(ctx.channel, rho)
        return [_row(snr, name, params, gb, None, "trivial", 0, 0.0, 0, N_t)]
    if name == "seb":
        s = seb(const.M, N_t)
        return [_row(snr, name, params, s, None, "trivial", 0, 0.0, 0, N_t)]
    if name == "truth":
        try:
            e = true_entropy_oracle(ctx.channel, const, rho, *args, cap=cfg.oracle_cap, threads=threads)
        except OracleSizeError as exc:
            _warn(f"truth unavailable at {snr} dB: {exc}")
            p = dict(params, status="unavailable", components=exc.n_components)
            return [_row(snr, name, p, None, None, "exact", None, None, 0, N_t)]
        return [_row(snr, name, params, e.mi_up, e.h_up, "exact", e.mean_visited_nodes,
                     e.stderr_up, e.n_sentinels, N_t)]
    if name in ("dfs", "bfs"):
        search = _search_from(m, name)
        e = mc_entropy(ctx.channel, const, rho, search, *args, threads=threads)
        if e.n_sentinels:
            _warn(f"{name} at {snr} dB: {e.n_sentinels} zero-density samples excluded")
        rows = [_row(snr, name, params, e.mi_up, e.h_up, "upper", e.mean_visited_nodes,
                     e.stderr_up, e.n_sentinels, N_t)]
        if e.h_lo is not None:
            rows.append(_row(snr, name, params, e.mi_lo, e.h_lo, "lower",
                             e.mean_visited_nodes, e.stderr_lo, e.n_sentinels, N_t))
        rows.append(_row(snr, name, params, e.mi_lo_plus, e.h_lo_plus, "lower_plus",
                         e.mean_visited_nodes, e.stderr_lo_plus, e.n_sentinels, N_t))
        return rows
    if name == "sdea":
        search = _search_from(m, name)
        thresholds = _sdea_thresholds(m, ctx)
        rho_ref = 10 ** (m["rho_ref_db"] / 10) if "rho_ref_db" in m else ctx.rho_c
        e = sdea_mi(ctx.sorted_channel, const, rho, thresholds, search, *args,
                    rho_ref=rho_ref, threads=threads)
        if e.n_fallbacks:
            _warn(f"sdea at {snr} dB: {e.n_fallbacks} empty candidate sets replaced by the anchor")
        return [_row(snr, name, params, e.mi, e.mi + hn, "approx", e.mean_visited_nodes,
                     e.stderr, e.n_sentinels, N_t)]
    if name in ("sa", "hd1"):
        fn = sa_mi if name == "sa" else hd1_mi
        e = fn(ctx.channel, const, rho, *args, threads=threads)
        return [_row(snr, name, params, e.mi, e.h, "approx", e.mean_visited_nodes,
                     e.stderr, e.n_sentinels, N_t)]
    if name == "bcjr":
        Q = m.get("Q")
        taps = fir_taps(cfg.channel)
        r = bcjr_mi(taps, const, rho, int(m["n"]), Q=Q, seed=cfg.seed, count_stages=N_t)
        nodes = trellis_complexity(const.M, len(taps) - 1, N_t, Q)
        kind = "exact" if Q is None else "upper"
        return [_row(snr, name, params, r.mi * N_t, (r.mi * N_t) + hn, kind, nodes,
                     r.stderr * N_t, 0, N_t)]
    raise ConfigError(f"unknown method {name!r}")


def _unavailable(m, snr, N_t, exc):
    _warn(f"{m['name']} unavailable at {snr} dB: {exc}")
    params = {k: v for k, v in m.items() if k != "name"}
    params["status"] = "unavailable"
    kind = "exact" if m["name"] == "truth" else "approx" if m["name"] == "sdea" else "upper"
    return [_row(snr, m["name"], params, None, None, kind, None, None, 0, N_t)]


def run_experiment(config, sink=None, threads=None):
    """Run every (SNR, method) pair of ``config``.

    Rows are passed to ``sink`` as soon as they are produced and also
    returned. Oracle refusals and searches that outgrow the live-path guard
    yield a row marked ``unavailable`` and the remaining methods proceed.
    """
    ctx = _Context(config)
    rows = []
    for snr in config.snr_db:
        for m in config.methods:
            t0 = time.perf_counter()
            try:
                new = _run_method(m, snr, ctx, threads)
            except SearchSizeError as exc:
                new = _unavailable(m, snr, ctx.N_t, exc)
            ms = (time.perf_counter() - t0) * 1e3
            for r in new:
                r.wall_ms = ms
                if sink is not None:
                    sink(r)
            rows.extend(new)
    return rows


def sweep_convergence(config, param, grid, snr_db=None, threads=None):
    """Bounds at one SNR as ``alpha`` (sphere search) or ``K`` (K-best) grows.

    Returns one :class:`SweepRow` per grid value, in grid order. ``h_true``
    is filled when the exhaustive oracle is within the size cap.
    """
    if param not in ("alpha", "k"):
        raise ConfigError(f"sweep parameter must be 'alpha' or 'k', got {param!r}")
    if snr_db is None:
        if not config.snr_db:
            raise ConfigError("sweep needs an SNR point")
        snr_db = config.snr_db[0]
    try:
        values = [_number(v, "grid") if param == "alpha" else int(v) for v in grid]
    except ValueError:
        raise ConfigError(f"bad {param} grid {grid!r}") from None
    if any(not v >= 1 for v in values):
        raise ConfigError(f"{param} grid values must be >= 1")
    ctx = _Context(config)
    rho = 10 ** (snr_db / 10)
    args = (config.N_d, config.N_n, config.seed)
    try:
        h_true = true_entropy_oracle(ctx.channel, ctx.const, rho, *args,
                                     cap=config.oracle_cap, threads=threads).h_up
    except OracleSizeError as exc:
        _warn(f"truth unavailable: {exc}")
        h_true = None
    rows = []
    for value in values:
        if param == "alpha":
            search = SearchParams("dfs", alpha=value)
        else:
            search = SearchParams("bfs", K=value)
        e = mc_entropy(ctx.channel, ctx.const, rho, search, *args, threads=threads)
        nodes = e.mean_visited_nodes
        if param == "k":
            nodes = float(complexity_C(int(value), ctx.const.M, ctx.N_t))
        rows.append(SweepRow(param, float(value), snr_db, e.h_up,
                             e.h_lo, e.h_lo_plus, h_true, nodes))
    return rows


def write_rows(rows, fh, columns=CSV_COLUMNS, timing=False):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow(r.csv_values(timing))


def rows_to_csv(rows, columns=CSV_COLUMNS, timing=False):
    buf = io.StringIO()
    write_rows(rows, buf, columns, timing)
    return buf.getvalue()


def write_metadata(path, config, rows, extra=None):
    meta = {
        "sdentropy_version": __version__,
        "config": config.to_dict(),
        "wall_ms": [getattr(r, "wall_ms", None) for r in rows],
    }
    if extra:
        meta.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
