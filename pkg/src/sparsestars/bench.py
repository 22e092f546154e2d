"""Parameter sweeps over instances, with per-run CSV rows and grouped summaries."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .compiler import compile_unweighted, compile_weighted_edge_by_edge, metrics
from .decompose import select_decomposition
from .graph import WeightedGraph, load_graph, normalize_weights
from .maxcut import transfer
from .noise import NoiseParams, grid_search
from .sparsify import is_connected, sparsify

log = logging.getLogger(__name__)

WORKERS_ENV = "SPARSESTARS_WORKERS"
EXACT_ORACLE_MAX_N = 20


def parse_weight_dist(spec: str):
    """``unit``, ``uniform:lo:hi`` or ``int:lo:hi`` (inclusive integers)."""
    parts = spec.split(":")
    if parts[0] == "unit":
        return lambda rng, k: np.ones(k)
    if parts[0] == "uniform" and len(parts) == 3:
        lo, hi = float(parts[1]), float(parts[2])
        if not 0 < lo <= hi:
            raise ValueError("uniform weights need 0 < lo <= hi")
        return lambda rng, k: rng.uniform(lo, hi, k)
    if parts[0] == "int" and len(parts) == 3:
        lo, hi = int(parts[1]), int(parts[2])
        if not 0 < lo <= hi:
            raise ValueError("integer weights need 0 < lo <= hi")
        return lambda rng, k: rng.integers(lo, hi + 1, k).astype(float)
    raise ValueError(f"unknown weight distribution {spec!r}")


def generate_instance(
    kind: str, n: int, density: float = 0.2, weight_dist: str = "uniform:0.1:10", seed: int = 0, max_tries: int = 1000
) -> WeightedGraph:
    """Connected synthetic instance; G(n, p) kinds are rejection-resampled until connected."""
    if n < 2:
        raise ValueError("need n >= 2")
    rng = np.random.default_rng(seed)
    if kind == "random-unweighted":
        weight_dist = "unit"
    draw = parse_weight_dist(weight_dist)
    if kind == "tree":
        parents = [int(rng.integers(0, i)) for i in range(1, n)]
        w = draw(rng, n - 1)
        return WeightedGraph.from_edges(n, [(p, i, x) for i, (p, x) in enumerate(zip(parents, w), start=1)])
    if kind == "complete":
        iu, iv = np.triu_indices(n, 1)
        return WeightedGraph.from_edges(n, zip(iu.tolist(), iv.tolist(), draw(rng, iu.size).tolist()))
    if kind not in ("random-weighted", "random-unweighted"):
        raise ValueError(f"unknown instance kind {kind!r}")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    if density * n * (n - 1) / 2 < n - 1:
        raise ValueError(f"density {density} gives fewer expected edges than a spanning tree on {n} vertices")
    iu, iv = np.triu_indices(n, 1)
    for _ in range(max_tries):
        keep = rng.random(iu.size) < density
        g = WeightedGraph.from_edges(n, zip(iu[keep].tolist(), iv[keep].tolist(), draw(rng, int(keep.sum())).tolist()))
        if g.m and is_connected(g):
            return g
    raise ValueError(f"no connected sample after {max_tries} tries")


@dataclass
class RunConfig:
    instances: list[str] = field(default_factory=list)
    generate: dict | None = None
    q_values: list[Any] = field(default_factory=lambda: ["1.0m"])
    eps2_values: list[float] = field(default_factory=lambda: [1.0])
    gamma_values: list[float] = field(default_factory=lambda: [0.0])
    seeds: list[int] = field(default_factory=lambda: [0])
    gamma_range: tuple[float, float] = (0.0, math.pi)
    beta_range: tuple[float, float] = (0.0, math.pi / 2)
    grid_step: float = 0.01 * math.pi
    oracle: str = "auto"
    restarts: int = 64
    normalize: bool = True
    landscapes: bool = False

    def __post_init__(self):
        for q in self.q_values:
            resolve_q(q, 100)
        if any(not e > 0 for e in self.eps2_values):
            raise ValueError("eps2 values must be positive")
        if any(g < 0 for g in self.gamma_values):
            raise ValueError("dephasing rates must be nonnegative")
        if self.oracle not in ("auto", "exact", "heuristic"):
            raise ValueError(f"unknown oracle mode {self.oracle!r}")
        if self.restarts < 1 or not self.grid_step > 0:
            raise ValueError("restarts and grid step must be positive")
        self.gamma_range = tuple(self.gamma_range)
        self.beta_range = tuple(self.beta_range)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path: str | os.PathLike) -> "RunConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def resolve_q(q, m: int) -> int | None:
    """``None`` disables sparsification; ``"0.5m"`` is a fraction of m; numbers are absolute."""
    if q is None:
        return None
    if isinstance(q, str):
        if q.endswith("m"):
            frac = float(q[:-1])
            if not frac > 0:
                raise ValueError(f"bad q value {q!r}")
            return max(1, round(frac * m))
        q = float(q)
    if not q >= 1 or int(q) != q:
        raise ValueError(f"q must be a positive integer or a fraction like '0.5m', got {q!r}")
    return int(q)


def q_label(q) -> str:
    return "none" if q is None else str(q)


@dataclass(frozen=True)
class Instance:
    id: str
    graph: WeightedGraph


def load_instances(config: RunConfig) -> list[Instance]:
    out = [Instance(Path(p).stem, load_graph(p)) for p in config.instances]
    gen = config.generate
    if gen:
        count = int(gen.get("count", 1))
        base = int(gen.get("seed", 0))
        for i in range(count):
            g = generate_instance(
                gen.get("kind", "random-weighted"),
                int(gen["n"]),
                float(gen.get("density", 0.2)),
                gen.get("weights", "uniform:0.1:10"),
                base + i,
            )
            out.append(Instance(f"{gen.get('kind', 'random-weighted')}-n{gen['n']}-s{base + i}", g))
    return out


RAW_FIELDS = [
    "run", "instance", "n", "m", "q", "q_samples", "eps2", "Gamma", "seed", "status",
    "kind", "exp_pulses", "binary_pulses", "m_sparse", "m_modified",
    "base_pulses", "base_bitflips", "base_T",
    "mod_pulses", "mod_bitflips", "mod_T", "dec_T",
    "cut_transfer", "cut_reference", "oracle_exact",
    "ideal_cost", "cost_original", "cost_decomposed", "cost_sparse",
    "gamma_original", "gamma_decomposed", "gamma_sparse",
]
DERIVED_FIELDS = [
    "pulse_ratio", "ops_ratio", "time_ratio", "approx_ratio",
    "t_original", "t_decomposed", "t_sparse",
    "noise_ratio_original", "noise_ratio_decomposed", "noise_ratio_sparse",
    "bound_original", "bound_decomposed", "bound_sparse",
    "improvement_decomposed", "improvement_sparse",
]


@dataclass
class RunRecord:
    """One sweep point. Derived quantities are properties of the raw fields."""

    run: int
    instance: str
    n: int
    m: int
    q: str
    q_samples: int | None
    eps2: float
    Gamma: float
    seed: int
    status: str = "ok"
    kind: str = ""
    exp_pulses: int = 0
    binary_pulses: int = 0
    m_sparse: int = 0
    m_modified: int = 0
    base_pulses: int = 0
    base_bitflips: int = 0
    base_T: float = 0.0
    mod_pulses: int = 0
    mod_bitflips: int = 0
    mod_T: float = 0.0
    dec_T: float = 0.0
    cut_transfer: float = 0.0
    cut_reference: float = 0.0
    oracle_exact: bool = False
    ideal_cost: float = math.nan
    cost_original: float = math.nan
    cost_decomposed: float = math.nan
    cost_sparse: float = math.nan
    gamma_original: float = math.nan
    gamma_decomposed: float = math.nan
    gamma_sparse: float = math.nan

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def pulse_ratio(self) -> float:
        return self.mod_pulses / self.base_pulses

    @property
    def ops_ratio(self) -> float:
        return (self.mod_pulses + self.mod_bitflips) / (self.base_pulses + self.base_bitflips)

    @property
    def time_ratio(self) -> float:
        return self.mod_T / self.base_T

    @property
    def approx_ratio(self) -> float:
        return self.cut_transfer / self.cut_reference if self.cut_reference > 0 else 1.0

    @property
    def t_original(self) -> float:
        return abs(self.gamma_original) * self.base_T

    @property
    def t_decomposed(self) -> float:
        return abs(self.gamma_decomposed) * self.dec_T

    @property
    def t_sparse(self) -> float:
        return abs(self.gamma_sparse) * self.mod_T

    def _bound(self, t: float) -> float:
        return math.exp(-self.Gamma * t / 2)

    @property
    def noise_ratio_original(self) -> float:
        return self.cost_original / self.ideal_cost

    @property
    def noise_ratio_decomposed(self) -> float:
        return self.cost_decomposed / self.ideal_cost

    @property
    def noise_ratio_sparse(self) -> float:
        return self.cost_sparse / self.ideal_cost

    @property
    def bound_original(self) -> float:
        return self._bound(self.t_original)

    @property
    def bound_decomposed(self) -> float:
        return self._bound(self.t_decomposed)

    @property
    def bound_sparse(self) -> float:
        return self._bound(self.t_sparse)

    @property
    def improvement_decomposed(self) -> float:
        return self.cost_decomposed / self.cost_original

    @property
    def improvement_sparse(self) -> float:
        return self.cost_sparse / self.cost_original

    def row(self) -> dict:
        out = {k: getattr(self, k) for k in RAW_FIELDS}
        for k in DERIVED_FIELDS:
            try:
                out[k] = getattr(self, k) if self.ok else ""
            except ZeroDivisionError:
                out[k] = math.nan
        return {k: _fmt(v) for k, v in out.items()}

    @classmethod
    def from_row(cls, row: dict) -> "RunRecord":
        kwargs = {}
        for f in dataclasses.fields(cls):
            raw = row.get(f.name, "")
            kwargs[f.name] = _parse(f.type, raw)
        return cls(**kwargs)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse(tp: str, raw: str):
    if tp == "int":
        return int(raw)
    if tp == "int | None":
        return int(raw) if raw != "" else None
    if tp == "float":
        return float(raw) if raw != "" else math.nan
    if tp == "bool":
        return raw == "1"
    return raw


def _best_cut_mode(config: RunConfig, n: int) -> str:
    if config.oracle == "auto":
        return "exact" if n <= EXACT_ORACLE_MAX_N else "heuristic"
    return config.oracle


def baseline_schedule(graph: WeightedGraph):
    if graph.is_unweighted:
        w = graph.weights[0] if graph.m else 1.0
        return compile_unweighted(graph, coeff=float(w))
    return compile_weighted_edge_by_edge(graph)


def run_one(config: RunConfig, index: int, inst: Instance, q, eps2: float, gamma: float, seed: int) -> RunRecord:
    g = normalize_weights(inst.graph)[0] if config.normalize else inst.graph
    q_samples = resolve_q(q, g.m)
    rec = RunRecord(index, inst.id, g.n, g.m, q_label(q), q_samples, eps2, gamma, seed)
    base = metrics(baseline_schedule(g))
    h = g if q_samples is None else sparsify(g, q_samples, seed)
    sel = select_decomposition(h, eps2)
    mod = metrics(sel.schedule)
    g_mod = sel.chosen.effective_graph()
    rec.kind = sel.chosen.kind
    rec.exp_pulses, rec.binary_pulses = sel.exp_pulses, sel.binary_pulses
    rec.m_sparse, rec.m_modified = h.m, g_mod.m
    rec.base_pulses, rec.base_bitflips, rec.base_T = base.n_pulses, base.n_bitflips, base.total_time
    rec.mod_pulses, rec.mod_bitflips, rec.mod_T = mod.n_pulses, mod.n_bitflips, mod.total_time

    mode = _best_cut_mode(config, g.n)
    tr = transfer(g, g_mod, mode, config.restarts, seed)
    rec.cut_transfer, rec.cut_reference, rec.oracle_exact = tr.transferred_value, tr.reference_value, tr.exact

    dec = select_decomposition(g, eps2)
    g_dec = dec.chosen.effective_graph()
    rec.dec_T = metrics(dec.schedule).total_time
    grid = dict(gamma_range=config.gamma_range, beta_range=config.beta_range, step=config.grid_step)
    ideal = grid_search(g, g, NoiseParams(), **grid)
    rec.ideal_cost = ideal.argmin[2]
    land = {
        "original": grid_search(g, g, NoiseParams(gamma, base.total_time), **grid),
        "decomposed": grid_search(g, g_dec, NoiseParams(gamma, rec.dec_T), **grid),
        "sparse": grid_search(g, g_mod, NoiseParams(gamma, rec.mod_T), **grid),
    }
    for name, ls in land.items():
        gs, _, val = ls.argmin
        setattr(rec, f"cost_{name}", val)
        setattr(rec, f"gamma_{name}", gs)
    if config.landscapes:
        rec._landscapes = {"ideal": ideal, **land}
    return rec


def expand(config: RunConfig, instances: Sequence[Instance]) -> list[tuple]:
    jobs = []
    for inst in instances:
        for q in config.q_values:
            for eps2 in config.eps2_values:
                for gamma in config.gamma_values:
                    for seed in config.seeds:
                        jobs.append((len(jobs), inst, q, float(eps2), float(gamma), int(seed)))
    return jobs


def _run_job(args) -> tuple[RunRecord, float, dict | None]:
    config, (index, inst, q, eps2, gamma, seed) = args
    start = time.perf_counter()
    try:
        rec = run_one(config, index, inst, q, eps2, gamma, seed)
    except Exception as exc:  # recorded, the sweep continues
        log.warning("run %d (%s) failed: %s", index, inst.id, exc)
        rec = RunRecord(index, inst.id, inst.graph.n, inst.graph.m, q_label(q), None, eps2, gamma, seed,
                        status=f"error: {type(exc).__name__}: {exc}")
    lands = getattr(rec, "_landscapes", None)
    if lands is not None:
        lands = {k: v.to_csv() for k, v in lands.items()}
        del rec._landscapes
    return rec, time.perf_counter() - start, lands


def run_pipeline(config: RunConfig, workers: int | None = None, timings: list | None = None,
                 landscapes: dict | None = None) -> list[RunRecord]:
    """Execute every (instance, q, eps2, Gamma, seed) combination; results keep job order."""
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    jobs = [(config, j) for j in expand(config, load_instances(config))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(j) for j in jobs]
    records = []
    for rec, secs, lands in results:
        records.append(rec)
        if timings is not None:
            timings.append((rec.run, secs))
        if landscapes is not None and lands:
            landscapes[f"{rec.run}-{rec.instance}"] = lands
    return records


def records_csv(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=RAW_FIELDS + DERIVED_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def read_records(path: str | os.PathLike) -> list[RunRecord]:
    with open(path, newline="") as fh:
        return [RunRecord.from_row(row) for row in csv.DictReader(fh)]


SUMMARY_METRICS = ["pulse_ratio", "ops_ratio", "time_ratio", "approx_ratio",
                   "noise_ratio_original", "noise_ratio_decomposed", "noise_ratio_sparse",
                   "improvement_decomposed", "improvement_sparse"]


def summarize(records: Sequence[RunRecord], min_approx: float = 0.90) -> dict:
    """Means per ``(q, eps2, Gamma)`` group, plus the groups whose mean approximation clears ``min_approx``."""
    groups: dict[tuple, list[RunRecord]] = {}
    for r in records:
        if r.ok:
            groups.setdefault((r.q, r.eps2, r.Gamma), []).append(r)
    table = []
    for (q, eps2, gamma), rs in groups.items():
        entry = {"q": q, "eps2": eps2, "Gamma": gamma, "runs": len(rs),
                 "oracle": "exact" if all(r.oracle_exact for r in rs) else
                           "heuristic" if not any(r.oracle_exact for r in rs) else "mixed"}
        for k in SUMMARY_METRICS:
            entry[f"mean_{k}"] = float(np.mean([getattr(r, k) for r in rs]))
        table.append(entry)
    return {
        "groups": table,
        "filtered": [e for e in table if e["mean_approx_ratio"] >= min_approx],
        "min_approx": min_approx,
        "n_runs": len(records),
        "n_failed": sum(not r.ok for r in records),
    }


def emit_report(records: Sequence[RunRecord], out_dir: str | os.PathLike,
                landscapes: dict | None = None, timings: list | None = None) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "runs.csv", out / "summary.json"]
    written[0].write_text(records_csv(records))
    written[1].write_text(json.dumps(summarize(records), indent=2, sort_keys=True) + "\n")
    for key, lands in (landscapes or {}).items():
        for name, text in lands.items():
            p = out / f"landscape_{key}_{name}.csv"
            p.write_text(text)
            written.append(p)
    if timings is not None:
        p = out / "timings.log"
        stamp = time.strftime("%Y-%m-%dT%H:%M:%S")
        p.write_text("".join(f"{stamp} run={i} seconds={s:.3f}\n" for i, s in timings))
        written.append(p)
    return written
