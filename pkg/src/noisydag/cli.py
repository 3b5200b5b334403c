"""Experiment runner: every analysis as a subcommand with seeded,
machine-readable CSV/JSON output.

Exit codes: 0 success, 2 usage/configuration, 3 desk-scale guard, 4
infeasible search.  Config files are flat key=value text; command-line flags
override file values.  All floats print with 12 significant digits.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys

import numpy as np

from . import __version__, bounds, chain, expander, maps, sim
from .core import (
    ConfigurationError,
    ConstantSchedule,
    ExpanderSchedule,
    ExplicitSchedule,
    LinearSchedule,
    LogGrowthSchedule,
    SearchExhaustedError,
    SizeGuardError,
    and_rule,
    identity_rule,
    majority_rule,
    or_rule,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_GUARD = 3
EXIT_INFEASIBLE = 4


class UsageError(ValueError):
    pass


def fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def parse_schedule(spec: str):
    """Schedule mini-language: const:64 | log:C,Lmin | linear:a,b |
    expander:N,d[,M] | explicit:1,5,9,..."""
    try:
        kind, _, rest = spec.partition(":")
        args = rest.split(",") if rest else []
        if kind == "const":
            return ConstantSchedule(int(args[0]))
        if kind == "log":
            return LogGrowthSchedule(float(args[0]), int(args[1]) if len(args) > 1 else 1)
        if kind == "linear":
            return LinearSchedule(int(args[0]), int(args[1]) if len(args) > 1 else 0)
        if kind == "expander":
            ratio = float(args[2]) if len(args) > 2 else None
            return ExpanderSchedule(int(args[0]), float(args[1]), ratio)
        if kind == "explicit":
            return ExplicitSchedule(tuple(int(a) for a in args))
    except (ValueError, IndexError, ConfigurationError) as exc:
        raise UsageError(f"bad schedule spec {spec!r}: {exc}") from exc
    raise UsageError(f"unknown schedule kind {spec!r}")


def read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for ln_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{ln_no}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def resolve(args, config: dict, key: str, default=None, cast=str):
    """Flag value if given, else config value, else default."""
    val = getattr(args, key.replace("-", "_"), None)
    if val is not None:
        return val
    if key in config:
        try:
            return cast(config[key])
        except ValueError as exc:
            raise UsageError(f"config key {key}: {exc}") from exc
    return default


class Emitter:
    """Serializes one command's metadata + rows as CSV or JSON."""

    def __init__(self, meta: dict, fmt_kind: str, out_path: str = None):
        self.meta = {"version": __version__, **meta}
        self.kind = fmt_kind
        self.out_path = out_path

    def emit_rows(self, header, rows):
        buf = io.StringIO()
        if self.kind == "json":
            payload = {"meta": self.meta,
                       "rows": [dict(zip(header, [self._j(v) for v in row])) for row in rows]}
            json.dump(payload, buf, indent=2, sort_keys=True)
            buf.write("\n")
        else:
            for key in sorted(self.meta):
                buf.write(f"# {key}={fmt(self.meta[key])}\n")
            buf.write(",".join(header) + "\n")
            for row in rows:
                buf.write(",".join(fmt(v) for v in row) + "\n")
        self._write(buf.getvalue())

    def emit_object(self, obj: dict):
        buf = io.StringIO()
        if self.kind == "json":
            payload = {"meta": self.meta, **{k: self._j(v) for k, v in obj.items()}}
            json.dump(payload, buf, indent=2, sort_keys=True)
            buf.write("\n")
        else:
            for key in sorted(self.meta):
                buf.write(f"# {key}={fmt(self.meta[key])}\n")
            buf.write(",".join(obj.keys()) + "\n")
            buf.write(",".join(fmt(v) for v in obj.values()) + "\n")
        self._write(buf.getvalue())

    def emit_text(self, text: str):
        self._write(text)

    @staticmethod
    def _j(v):
        # floats round-trip through the 12-significant-digit contract
        if isinstance(v, float):
            return float(fmt(v))
        if isinstance(v, (np.integer,)):
            return int(v)
        return v

    def _write(self, text: str):
        if self.out_path:
            with open(self.out_path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _family(name: str, delta: float, d: int, schedule) -> chain.ChainFamily:
    if name == "majority":
        return chain.majority_family(d, delta, schedule)
    if name == "andor":
        return chain.andor_family(delta, schedule)
    if name == "unbounded":
        return chain.unbounded_family(delta, schedule)
    raise UsageError(f"unknown family {name!r}")


def _rules_for(name: str, d: int, depth: int):
    if name == "majority":
        return [majority_rule(d)] * depth
    if name == "andor":
        return [and_rule(2) if k % 2 == 0 else or_rule(2) for k in range(1, depth + 1)]
    raise UsageError(f"family {name!r} has no gate realization")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_thresholds(args, config):
    d_from = resolve(args, config, "d-from", 3, int)
    d_to = resolve(args, config, "d-to", d_from, int)
    if d_to < d_from:
        raise UsageError("empty degree range must still be ordered (d-from <= d-to)")
    header = ["d", "majority_threshold", "es_threshold", "bond_threshold", "andor_threshold"]
    rows = []
    for d in range(d_from, d_to + 1):
        rows.append([
            d,
            maps.majority_critical_noise(d) if d >= 3 else float("nan"),
            bounds.es_threshold(d),
            bounds.bond_threshold(d),
            maps.andor_critical_noise() if d == 2 else float("nan"),
        ])
    return header, rows


def cmd_fixedpoints(args, config):
    family = resolve(args, config, "family", "majority")
    delta = resolve(args, config, "delta", None, float)
    if delta is None:
        raise UsageError("--delta is required")
    if family == "majority":
        d = resolve(args, config, "d", 3, int)
        report = maps.majority_fixed_points(delta, d)
    elif family == "andor":
        report = maps.andor_fixed_points(delta)
    else:
        raise UsageError("fixedpoints supports the majority and andor families")
    header = ["point", "derivative", "stable"]
    rows = [[p, g, int(s)] for p, g, s in
            zip(report.points, report.derivatives, report.stable)]
    return header, rows


def _chain_rows(family_name, family, depth, threshold, include_odd):
    rows = []
    for k, plus, minus in chain.evolve_pair_levels(family, depth):
        if family_name == "andor" and k % 2 == 1 and not include_odd:
            continue
        pair = (plus, minus)
        tv = chain.tv_distance(plus, minus)
        rows.append([k, tv, chain.decoder_error(pair, threshold),
                     chain.ml_error_on_sigma(pair)])
    return rows


def cmd_chain(args, config):
    family_name = resolve(args, config, "family", "majority")
    delta = resolve(args, config, "delta", None, float)
    depth = resolve(args, config, "depth", None, int)
    if delta is None or depth is None:
        raise UsageError("--delta and --depth are required")
    d = resolve(args, config, "d", 3, int)
    schedule = parse_schedule(resolve(args, config, "schedule", "const:64"))
    family = _family(family_name, delta, d if family_name == "majority" else None, schedule)
    threshold = resolve(args, config, "threshold", None, float)
    if threshold is None:
        threshold = (maps.andor_fixed_points(delta).middle
                     if family_name == "andor" else 0.5)
    include_odd = bool(getattr(args, "include_odd", False))
    header = ["k", "tv", "decoder_error", "ml_error"]
    return header, _chain_rows(family_name, family, depth, threshold, include_odd)


def cmd_simulate(args, config, emitter_meta):
    family_name = resolve(args, config, "family", "majority")
    delta = resolve(args, config, "delta", None, float)
    depth = resolve(args, config, "depth", None, int)
    trials = resolve(args, config, "trials", None, int)
    if delta is None or depth is None or trials is None:
        raise UsageError("--delta, --depth and --trials are required")
    if trials < 1:
        raise UsageError("--trials must be >= 1")
    seed = resolve(args, config, "seed", 0, int)
    threads = resolve(args, config, "threads", 1, int)
    decoder = resolve(args, config, "decoder", "majority")
    threshold = resolve(args, config, "threshold", None, float)
    if threshold is None:
        threshold = (maps.andor_fixed_points(delta).middle
                     if family_name == "andor" else 0.5)
    d = resolve(args, config, "d", 3 if family_name == "majority" else 2, int)
    dag_path = resolve(args, config, "dag", None)
    rules = _rules_for(family_name, d, depth)
    if dag_path:
        dag = sim.read_dag(dag_path)
        model = sim.McModel.fixed(dag, delta, sim.majority_rules_for(dag)
                                  if family_name == "majority" else rules)
        mode = "fixed-dag"
    else:
        schedule = parse_schedule(resolve(args, config, "schedule", "const:64"))
        model = sim.McModel.random(schedule, d, depth, delta, rules)
        mode = "random-dag"
    estimate, ci = sim.mc_error_estimate(model, decoder, trials, seed,
                                         threshold=threshold, threads=threads)
    emitter_meta.update(mode=mode, decoder=decoder, trials=trials, seed=seed,
                        threads=threads, threshold=threshold)
    return {"estimate": estimate, "ci99": ci, "seed": seed}


def cmd_coupled(args, config, emitter_meta):
    family_name = resolve(args, config, "family", "majority")
    delta = resolve(args, config, "delta", None, float)
    depth = resolve(args, config, "depth", None, int)
    trials = resolve(args, config, "trials", None, int)
    if delta is None or depth is None or trials is None:
        raise UsageError("--delta, --depth and --trials are required")
    seed = resolve(args, config, "seed", 0, int)
    threads = resolve(args, config, "threads", 1, int)
    d = resolve(args, config, "d", 3 if family_name == "majority" else 2, int)
    schedule = parse_schedule(resolve(args, config, "schedule", "const:16"))
    rules = _rules_for(family_name, d, depth)
    model = sim.McModel.random(schedule, d, depth, delta, rules)
    violations, gap_mean, differ = sim.mc_coupled_stats(model, trials, seed, threads=threads)
    emitter_meta.update(trials=trials, seed=seed, threads=threads)
    return {"violations": violations, "final_gap_mean": gap_mean,
            "final_differ_fraction": differ,
            "ci99": sim.hoeffding_halfwidth(trials)}


def cmd_percolate(args, config, emitter_meta):
    delta = resolve(args, config, "delta", None, float)
    depth = resolve(args, config, "depth", None, int)
    trials = resolve(args, config, "trials", None, int)
    if delta is None or depth is None or trials is None:
        raise UsageError("--delta, --depth and --trials are required")
    d = resolve(args, config, "d", 3, int)
    seed = resolve(args, config, "seed", 0, int)
    threads = resolve(args, config, "threads", 1, int)
    schedule = parse_schedule(resolve(args, config, "schedule", "const:64"))
    means, hit_rates, ci = sim.percolation_site_sim(schedule, d, delta, depth,
                                                    trials, seed, threads=threads)
    emitter_meta.update(trials=trials, seed=seed, threads=threads, ci99=ci)
    header = ["k", "mc_mean", "hit_rate", "recursion", "envelope"]
    rows = []
    lam = 1.0
    for k in range(depth + 1):
        rows.append([k, float(means[k]), float(hit_rates[k]), lam,
                     bounds.site_critical_envelope(delta, d, k)])
        lam = bounds.site_recursion(lam, delta, d)
    return header, rows


def cmd_bounds(args, config):
    delta = resolve(args, config, "delta", None, float)
    depth = resolve(args, config, "depth", None, int)
    if delta is None or depth is None:
        raise UsageError("--delta and --depth are required")
    d = resolve(args, config, "d", 3, int)
    width = resolve(args, config, "width", 64, int)
    header = ["k", "es_mi_bound", "site_envelope", "slow_growth_limit"]
    rows = []
    for k in range(depth + 1):
        rows.append([
            k,
            bounds.es_mi_bound(width, delta, d, k),
            bounds.site_critical_envelope(delta, d, k),
            bounds.slow_growth_limit(delta, d, k) if k >= 2 else float("nan"),
        ])
    return header, rows


def cmd_expander(args, config, emitter_meta):
    sub = args.expander_cmd
    if sub == "gen":
        n = resolve(args, config, "n", None, int)
        d = resolve(args, config, "d", None, int)
        if n is None or d is None:
            raise UsageError("gen needs --n and --d")
        seed = resolve(args, config, "seed", 0, int)
        g = expander.sample_regular_bipartite(n, d, seed)
        emitter_meta.update(n=n, d=d, seed=seed)
        return ("text", expander.graph_to_text(g))
    if sub == "verify":
        path = resolve(args, config, "in", None)
        if path is None:
            raise UsageError("verify needs --in")
        s = resolve(args, config, "s", None, int)
        beta = resolve(args, config, "beta", None, int)
        if s is None or beta is None:
            raise UsageError("verify needs --s and --beta")
        g = expander.read_graph(path)
        cert = expander.verify_expansion(g, s, beta)
        emitter_meta.update(n=g.n, d=g.d)
        return ("object", {"subset_size": cert.subset_size,
                           "min_neighborhood": cert.min_neighborhood,
                           "required": cert.required,
                           "passed": int(cert.passed)})
    if sub == "search":
        n = resolve(args, config, "n", None, int)
        d = resolve(args, config, "d", None, int)
        s = resolve(args, config, "s", None, int)
        beta = resolve(args, config, "beta", None, int)
        if None in (n, d, s, beta):
            raise UsageError("search needs --n, --d, --s and --beta")
        g = expander.deterministic_search(n, d, s, beta)
        emitter_meta.update(n=n, d=d, s=s, beta=beta)
        return ("text", expander.graph_to_text(g))
    if sub == "assemble":
        N = resolve(args, config, "N", None, int)
        d = resolve(args, config, "d", None, int)
        depth = resolve(args, config, "depth", None, int)
        if None in (N, d, depth):
            raise UsageError("assemble needs --N, --d and --depth")
        seed = resolve(args, config, "seed", 0, int)
        ratio = resolve(args, config, "ratio", None, float)
        schedule = ExpanderSchedule(N, d, ratio)
        provider = expander.SampledProvider(d, seed)
        dag = expander.assemble_expander_dag(N, d, depth, provider, schedule)
        emitter_meta.update(N=N, d=d, depth=depth, seed=seed)
        return ("text", sim.dag_to_text(dag))
    if sub == "simulate":
        path = resolve(args, config, "in", None)
        delta = resolve(args, config, "delta", None, float)
        trials = resolve(args, config, "trials", None, int)
        if None in (path, delta, trials):
            raise UsageError("simulate needs --in, --delta and --trials")
        seed = resolve(args, config, "seed", 0, int)
        threads = resolve(args, config, "threads", 1, int)
        decoder = resolve(args, config, "decoder", "majority")
        dag = sim.read_dag(path)
        rules = [identity_rule() if dag.indegree(k) == 1 else majority_rule(dag.indegree(k))
                 for k in range(1, dag.depth + 1)]
        model = sim.McModel.fixed(dag, delta, rules)
        estimate, ci = sim.mc_error_estimate(model, decoder, trials, seed, threads=threads)
        emitter_meta.update(trials=trials, seed=seed, threads=threads, depth=dag.depth)
        return ("object", {"estimate": estimate, "ci99": ci, "seed": seed})
    raise UsageError(f"unknown expander subcommand {sub!r}")


# ---------------------------------------------------------------------------
# Sweep

_SWEEP_LIST_KEYS = ("delta", "d", "L", "depth")


def read_grid(path: str) -> dict:
    grid = {}
    with open(path) as fh:
        for ln_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{ln_no}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            try:
                if key in _SWEEP_LIST_KEYS:
                    cast = float if key == "delta" else int
                    grid[key] = [cast(v) for v in value.split(",") if v.strip()]
                else:
                    grid[key] = value.strip()
            except ValueError as exc:
                raise UsageError(f"{path}:{ln_no}: {exc}") from exc
    for key in _SWEEP_LIST_KEYS:
        if key not in grid or not grid[key]:
            raise UsageError(f"grid file must list values for {key}")
    return grid


def _cell_key(family, mode, delta, d, L, depth) -> str:
    return f"{family}|{mode}|{fmt(float(delta))}|{d}|{L}|{depth}"


def cmd_sweep(args, config, emitter_meta):
    grid_path = resolve(args, config, "grid", None)
    out_path = resolve(args, config, "out", None)
    if grid_path is None or out_path is None:
        raise UsageError("sweep needs --grid and --out")
    grid = read_grid(grid_path)
    family = grid.get("family", "majority")
    mode = grid.get("mode", "chain")
    trials = int(grid.get("trials", 10000))
    seed = int(grid.get("seed", resolve(args, config, "seed", 0, int)))
    threads = resolve(args, config, "threads", 1, int)
    manifest_path = out_path + ".manifest"
    done = set()
    if os.path.exists(manifest_path):
        with open(manifest_path) as fh:
            done = {ln.strip() for ln in fh if ln.strip()}
    header = ["family", "mode", "delta", "d", "L", "depth", "k",
              "tv", "decoder_error", "ml_error", "estimate", "ci99"]
    new_file = not os.path.exists(out_path) or not done
    rows_written = 0
    skipped = 0
    with open(out_path, "a" if not new_file else "w") as out_fh, \
            open(manifest_path, "a") as man_fh:
        if new_file:
            out_fh.write(",".join(header) + "\n")
        for delta in grid["delta"]:
            for d in grid["d"]:
                for L in grid["L"]:
                    for depth in grid["depth"]:
                        key = _cell_key(family, mode, delta, d, L, depth)
                        if key in done:
                            skipped += 1
                            continue
                        schedule = ConstantSchedule(L)
                        if mode == "chain":
                            fam = _family(family, delta,
                                          d if family == "majority" else None, schedule)
                            threshold = (maps.andor_fixed_points(delta).middle
                                         if family == "andor" else 0.5)
                            plus, minus = chain.evolve_pair(fam, depth)
                            pair = (plus, minus)
                            row = [family, mode, delta, d, L, depth, depth,
                                   chain.tv_distance(plus, minus),
                                   chain.decoder_error(pair, threshold),
                                   chain.ml_error_on_sigma(pair), "", ""]
                        elif mode == "simulate":
                            rules = _rules_for(family, d, depth)
                            model = sim.McModel.random(schedule, d, depth, delta, rules)
                            est, ci = sim.mc_error_estimate(
                                model, "majority", trials, seed, threads=threads)
                            row = [family, mode, delta, d, L, depth, depth,
                                   "", "", "", est, ci]
                        else:
                            raise UsageError(f"unknown sweep mode {mode!r}")
                        out_fh.write(",".join(fmt(v) for v in row) + "\n")
                        man_fh.write(key + "\n")
                        rows_written += 1
    emitter_meta.update(grid=grid_path, out=out_path, rows_written=rows_written,
                        skipped=skipped, seed=seed)
    return ("object", {"rows_written": rows_written, "skipped": skipped,
                       "out": out_path})


# ---------------------------------------------------------------------------
# Wiring


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="noisydag",
                                description="noisy layered-DAG broadcast experiments")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int)
        sp.add_argument("--threads", type=int)
        sp.add_argument("--format", choices=("csv", "json"), dest="format_")
        sp.add_argument("--out")
        sp.add_argument("--config")

    sp = sub.add_parser("thresholds", help="critical noise levels per degree")
    sp.add_argument("--d-from", type=int)
    sp.add_argument("--d-to", type=int)
    common(sp)

    sp = sub.add_parser("fixedpoints", help="fixed points of a mean map")
    sp.add_argument("--family", choices=("majority", "andor"))
    sp.add_argument("--d", type=int)
    sp.add_argument("--delta", type=float)
    common(sp)

    sp = sub.add_parser("chain", help="exact per-level chain metrics")
    sp.add_argument("--family", choices=("majority", "andor", "unbounded"))
    sp.add_argument("--d", type=int)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--schedule")
    sp.add_argument("--threshold", type=float)
    sp.add_argument("--include-odd", action="store_true")
    common(sp)

    sp = sub.add_parser("simulate", help="Monte Carlo decoding error")
    sp.add_argument("--family", choices=("majority", "andor"))
    sp.add_argument("--d", type=int)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--schedule")
    sp.add_argument("--decoder", choices=("majority", "biased", "single-vertex"))
    sp.add_argument("--threshold", type=float)
    sp.add_argument("--dag", help="fixed wiring from a DAG file")
    common(sp)

    sp = sub.add_parser("coupled", help="coupled root-1/root-0 statistics")
    sp.add_argument("--family", choices=("majority", "andor"))
    sp.add_argument("--d", type=int)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--schedule")
    common(sp)

    sp = sub.add_parser("percolate", help="site percolation Monte Carlo")
    sp.add_argument("--d", type=int)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--schedule")
    common(sp)

    sp = sub.add_parser("bounds", help="information-decay and percolation bounds")
    sp.add_argument("--d", type=int)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--width", type=int)
    common(sp)

    sp = sub.add_parser("expander", help="bipartite expander toolbox")
    esub = sp.add_subparsers(dest="expander_cmd", required=True)
    for name in ("gen", "verify", "search", "assemble", "simulate"):
        ssp = esub.add_parser(name)
        ssp.add_argument("--n", type=int)
        ssp.add_argument("--N", type=int)
        ssp.add_argument("--d", type=int)
        ssp.add_argument("--s", type=int)
        ssp.add_argument("--beta", type=int)
        ssp.add_argument("--depth", type=int)
        ssp.add_argument("--ratio", type=float)
        ssp.add_argument("--delta", type=float)
        ssp.add_argument("--trials", type=int)
        ssp.add_argument("--decoder", choices=("majority", "biased", "single-vertex"))
        ssp.add_argument("--in", dest="in_")
        common(ssp)

    sp = sub.add_parser("sweep", help="Cartesian parameter sweep, resumable")
    sp.add_argument("--grid")
    common(sp)

    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {}
    if getattr(args, "config", None):
        config = read_config(args.config)
    fmt_kind = resolve(args, config, "format_", None) or config.get("format", "csv")
    out_path = resolve(args, config, "out", None)
    seed = resolve(args, config, "seed", 0, int)
    threads = resolve(args, config, "threads", 1, int)

    meta = {"command": args.command, "seed": seed, "threads": threads,
            "format": fmt_kind}
    for key in ("family", "d", "delta", "depth", "schedule", "trials"):
        val = getattr(args, key, None)
        if val is None and key in config:
            val = config[key]
        if val is not None:
            meta[key] = val

    if args.command == "thresholds":
        header, rows = cmd_thresholds(args, config)
        Emitter(meta, fmt_kind, out_path).emit_rows(header, rows)
    elif args.command == "fixedpoints":
        header, rows = cmd_fixedpoints(args, config)
        Emitter(meta, fmt_kind, out_path).emit_rows(header, rows)
    elif args.command == "chain":
        header, rows = cmd_chain(args, config)
        Emitter(meta, fmt_kind, out_path).emit_rows(header, rows)
    elif args.command == "simulate":
        obj = cmd_simulate(args, config, meta)
        Emitter(meta, fmt_kind, out_path).emit_object(obj)
    elif args.command == "coupled":
        obj = cmd_coupled(args, config, meta)
        Emitter(meta, fmt_kind, out_path).emit_object(obj)
    elif args.command == "percolate":
        header, rows = cmd_percolate(args, config, meta)
        Emitter(meta, fmt_kind, out_path).emit_rows(header, rows)
    elif args.command == "bounds":
        header, rows = cmd_bounds(args, config)
        Emitter(meta, fmt_kind, out_path).emit_rows(header, rows)
    elif args.command == "expander":
        meta["expander_cmd"] = args.expander_cmd
        kind, payload = cmd_expander(args, config, meta)
        em = Emitter(meta, fmt_kind, out_path)
        if kind == "text":
            em.emit_text(payload)
        else:
            em.emit_object(payload)
    elif args.command == "sweep":
        _, payload = cmd_sweep(args, config, meta)
        Emitter(meta, fmt_kind, out_path).emit_object(payload)
    else:  # pragma: no cover - argparse enforces the choices
        raise UsageError(f"unknown command {args.command!r}")
    return EXIT_OK


def main(argv=None) -> int:
    try:
        return run(argv)
    except (UsageError, ConfigurationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeGuardError as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except SearchExhaustedError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
