"""Command-line entry point: ``sparsestars <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from . import bench
from .compiler import (
    compile_decomposition,
    compile_unweighted,
    compile_weighted_edge_by_edge,
    metrics,
    metrics_csv,
)
from .decompose import Decomposition, cut_guarantee_check, decompose, select_decomposition
from .graph import format_graph, load_graph, save_graph
from .maxcut import best_cut, transfer
from .noise import NoiseParams, grid_search
from .sparsify import sample_count_for_epsilon, sparsify


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _pi_range(text: str) -> tuple[float, float]:
    """``lo:hi`` in units of pi."""
    lo, hi = text.split(":")
    return float(lo) * math.pi, float(hi) * math.pi


def cmd_sparsify(args) -> int:
    g = load_graph(args.graph)
    q = args.q if args.q is not None else sample_count_for_epsilon(g.n, args.epsilon, args.c0)
    h = sparsify(g, q, args.seed)
    _write(format_graph(h), args.out)
    print(json.dumps({"q": q, "seed": args.seed, "m": g.m, "m_sparse": h.m}), file=sys.stderr)
    return 0


def cmd_decompose(args) -> int:
    g = load_graph(args.graph)
    if args.kind == "auto":
        sel = select_decomposition(g, args.epsilon)
        d = sel.chosen
        info = {"exp_pulses": sel.exp_pulses, "binary_pulses": sel.binary_pulses, "chosen": d.kind}
    else:
        d = decompose(g, args.epsilon, args.kind)
        info = {"chosen": d.kind}
    if args.check:
        rep = cut_guarantee_check(g, d, args.epsilon, mode="exhaustive" if g.n <= 20 else "sampled", seed=args.seed)
        info.update(worst_ratio=rep.worst_ratio, violations=rep.n_violations, cuts_checked=rep.n_checked)
    _write(d.to_json() + "\n", args.out)
    print(json.dumps(info), file=sys.stderr)
    return 0


def cmd_compile(args) -> int:
    if args.decomposition:
        with open(args.decomposition) as fh:
            sched = compile_decomposition(Decomposition.from_json(fh.read()))
    else:
        g = load_graph(args.graph)
        if args.mode == "unweighted":
            sched = compile_unweighted(g)
        elif args.mode == "edge":
            sched = compile_weighted_edge_by_edge(g)
        else:
            sched = bench.baseline_schedule(g)
    if args.out:
        _write(sched.to_jsonl(), args.out)
    sys.stdout.write(metrics_csv([metrics(sched)]))
    return 0


def cmd_maxcut(args) -> int:
    g = load_graph(args.graph)
    if args.compare:
        h = load_graph(args.compare)
        tr = transfer(g, h, args.mode, args.restarts, args.seed)
        out = {"ratio": tr.ratio, "value": tr.transferred_value, "reference": tr.reference_value, "exact": tr.exact}
    else:
        res = best_cut(g, args.mode, args.restarts, args.seed)
        out = {"value": res.value, "members": sorted(res.members), "exact": res.exact}
    out["seed"] = args.seed
    print(json.dumps(out))
    return 0


def cmd_landscape(args) -> int:
    c = load_graph(args.cost)
    cp = load_graph(args.coupling) if args.coupling else c
    t_unit = args.t_unit
    if t_unit is None and args.Gamma > 0:
        t_unit = metrics(bench.baseline_schedule(cp)).total_time
    land = grid_search(c, cp, NoiseParams(args.Gamma, t_unit), _pi_range(args.gamma_range),
                       _pi_range(args.beta_range), args.step * math.pi)
    _write(land.to_csv(), args.out)
    print(json.dumps(land.summary()), file=sys.stderr)
    return 0


def cmd_generate(args) -> int:
    g = bench.generate_instance(args.kind, args.n, args.density, args.weights, args.seed)
    if args.out:
        save_graph(g, args.out)
    else:
        sys.stdout.write(format_graph(g))
    return 0


def cmd_bench(args) -> int:
    settings: dict = {}
    if args.instances:
        settings["instances"] = args.instances
    if args.n:
        settings["generate"] = {"kind": args.kind, "n": args.n, "density": args.density,
                                "weights": args.weights, "count": args.count, "seed": args.instance_seed}
    for key, val in (("q_values", args.q), ("eps2_values", args.eps2), ("gamma_values", args.Gamma),
                     ("seeds", args.seeds)):
        if val:
            settings[key] = val
    if args.oracle:
        settings["oracle"] = args.oracle
    if args.landscapes:
        settings["landscapes"] = True
    if args.config:
        with open(args.config) as fh:
            settings.update(json.load(fh))
    config = bench.RunConfig.from_dict(settings)
    timings: list = []
    lands: dict = {}
    records = bench.run_pipeline(config, workers=args.workers, timings=timings, landscapes=lands)
    bench.emit_report(records, args.out, landscapes=lands, timings=timings)
    failed = sum(not r.ok for r in records)
    print(json.dumps({"runs": len(records), "failed": failed, "out": args.out}), file=sys.stderr)
    return 0 if failed == 0 else 1


def _q_arg(text: str):
    if text == "none":
        return None
    return text if text.endswith("m") else int(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sparsestars", description=__doc__)
    p.add_argument("--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sparsify", help="effective-resistance sparsifier")
    s.add_argument("--graph", required=True)
    grp = s.add_mutually_exclusive_group(required=True)
    grp.add_argument("--q", type=int)
    grp.add_argument("--epsilon", type=float)
    s.add_argument("--c0", type=float, default=1.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sparsify)

    s = sub.add_parser("decompose", help="unweighted-layer decomposition (JSON)")
    s.add_argument("--graph", required=True)
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--kind", choices=["exp", "binary", "auto"], default="auto")
    s.add_argument("--check", action="store_true", help="verify the non-trivial cut guarantee")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("compile", help="union-of-stars pulse schedule")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph")
    src.add_argument("--decomposition")
    s.add_argument("--mode", choices=["auto", "edge", "unweighted"], default="auto")
    s.add_argument("--out", help="write the schedule as JSON lines")
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("maxcut", help="exact or local-search Max-Cut")
    s.add_argument("--graph", required=True)
    s.add_argument("--compare", help="score the best cut of this graph in --graph")
    s.add_argument("--mode", choices=["exact", "heuristic"], default="exact")
    s.add_argument("--restarts", type=int, default=64)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_maxcut)

    s = sub.add_parser("landscape", help="single-layer QAOA cost landscape (CSV)")
    s.add_argument("--cost", required=True, help="graph scored by the cost operator")
    s.add_argument("--coupling", help="graph used in the phase separator (default: --cost)")
    s.add_argument("--Gamma", type=float, default=0.0, help="dephasing rate")
    s.add_argument("--t-unit", type=float, help="compile time at gamma=1 (default: baseline schedule time)")
    s.add_argument("--gamma-range", default="0:1", help="lo:hi in units of pi, lower end open")
    s.add_argument("--beta-range", default="0:0.5")
    s.add_argument("--step", type=float, default=0.01, help="grid step in units of pi")
    s.add_argument("--out")
    s.set_defaults(func=cmd_landscape)

    s = sub.add_parser("generate", help="synthetic connected instance")
    s.add_argument("--kind", default="random-weighted",
                   choices=["random-weighted", "random-unweighted", "tree", "complete"])
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--density", type=float, default=0.2)
    s.add_argument("--weights", default="uniform:0.1:10")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("bench", help="parameter sweep producing runs.csv and summary.json")
    s.add_argument("--config", help="JSON config; its keys override flags")
    s.add_argument("--instances", nargs="*")
    s.add_argument("--n", type=int, help="generate instances with this many vertices")
    s.add_argument("--kind", default="random-weighted")
    s.add_argument("--density", type=float, default=0.2)
    s.add_argument("--weights", default="uniform:0.1:10")
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--instance-seed", type=int, default=0)
    s.add_argument("--q", nargs="*", type=_q_arg, help="e.g. 0.5m 1.0m 400 none")
    s.add_argument("--eps2", nargs="*", type=float)
    s.add_argument("--Gamma", nargs="*", type=float)
    s.add_argument("--seeds", nargs="*", type=int)
    s.add_argument("--oracle", choices=["auto", "exact", "heuristic"])
    s.add_argument("--landscapes", action="store_true")
    s.add_argument("--workers", type=int, help=f"worker processes (default: ${bench.WORKERS_ENV} or 1)")
    s.add_argument("--out", default="bench_out")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
