"""Rewrite a weighted graph as a short weighted sum of unweighted layers.

Two bucketings are provided: geometric buckets of ratio ``1 + eps/2``
(``exp``) and the binary expansion of a quantized weight (``binary``).
Both drop or round weights down, never up, and keep every cut above half
the total weight within a factor ``1 - eps`` when ``eps < 1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .compiler import CompilationMetrics, PulseSchedule, compile_decomposition, metrics
from .graph import WeightedGraph, enumerate_cut_values, mask_bits, sum_graphs
from .sparsify import require_connected, sample_count_for_epsilon, sparsify

Kind = Literal["exp", "binary"]


@dataclass(frozen=True)
class Layer:
    index: int
    alpha: float
    edges: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Decomposition:
    n: int
    kind: Kind
    epsilon: float
    scale: float  # tau for exp, eta for binary
    k: int
    layers: tuple[Layer, ...]

    def effective_graph(self) -> WeightedGraph:
        terms = [(l.alpha, WeightedGraph(self.n, tuple((u, v, 1.0) for u, v in l.edges))) for l in self.layers]
        if not terms:
            return WeightedGraph(self.n)
        return sum_graphs(terms)

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "epsilon": self.epsilon,
                "tau_or_eta": self.scale,
                "n": self.n,
                "k": self.k,
                "layers": [
                    {"index": l.index, "alpha": l.alpha, "edges": [list(e) for e in l.edges]}
                    for l in self.layers
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Decomposition":
        d = json.loads(text)
        layers = tuple(
            Layer(int(l["index"]), float(l["alpha"]), tuple((int(a), int(b)) for a, b in l["edges"]))
            for l in d["layers"]
        )
        return cls(int(d["n"]), d["kind"], float(d["epsilon"]), float(d["tau_or_eta"]), int(d["k"]), layers)


def _check_input(graph: WeightedGraph, epsilon: float) -> None:
    if graph.m == 0:
        raise ValueError("cannot decompose a graph without edges")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")


def exp_bucket(c: float, tau: float, ratio: float) -> int:
    """The integer ``j`` with ``tau * ratio**(j-1) < c <= tau * ratio**j``."""
    j = max(1, math.ceil(math.log(c / tau) / math.log(ratio)))
    # the logarithm can land one bucket off near a boundary
    while c <= tau * ratio ** (j - 1):
        j -= 1
    while c > tau * ratio**j:
        j += 1
    return j


def exp_decompose(graph: WeightedGraph, epsilon: float) -> Decomposition:
    _check_input(graph, epsilon)
    n = graph.n
    ratio = 1.0 + epsilon / 2.0
    c_max = graph.max_weight
    tau = epsilon * c_max / (2.0 * n * n)
    k = math.ceil(math.log(c_max / tau) / math.log(ratio))
    buckets: dict[int, list[tuple[int, int]]] = {}
    for u, v, c in graph.edges:
        if c > tau:
            buckets.setdefault(exp_bucket(c, tau, ratio), []).append((u, v))
    k = max(k, max(buckets, default=0))
    layers = tuple(Layer(j, tau * ratio ** (j - 1), tuple(buckets[j])) for j in sorted(buckets))
    return Decomposition(n, "exp", epsilon, tau, k, layers)


def binary_layer_count(n: int, epsilon: float) -> int:
    return 1 + math.floor(math.log2(n * n / epsilon))


def binary_decompose(graph: WeightedGraph, epsilon: float) -> Decomposition:
    _check_input(graph, epsilon)
    n = graph.n
    eta = epsilon * graph.max_weight / (n * n)
    k = max(0, binary_layer_count(n, epsilon))
    bits: dict[int, list[tuple[int, int]]] = {}
    for u, v, c in graph.edges:
        d = math.floor(c / eta)
        if d * eta > c:
            d -= 1
        # d <= n^2/eps < 2^k, so no digit beyond the k-th can be set
        d = min(d, (1 << k) - 1)
        j = 1
        while d:
            if d & 1:
                bits.setdefault(j, []).append((u, v))
            d >>= 1
            j += 1
    layers = tuple(Layer(j, eta * 2 ** (j - 1), tuple(bits[j])) for j in sorted(bits))
    return Decomposition(n, "binary", epsilon, eta, k, layers)


def decompose(graph: WeightedGraph, epsilon: float, kind: Kind) -> Decomposition:
    if kind == "exp":
        return exp_decompose(graph, epsilon)
    if kind == "binary":
        return binary_decompose(graph, epsilon)
    raise ValueError(f"unknown decomposition kind {kind!r}")


@dataclass(frozen=True)
class CutReport:
    worst_ratio: float
    witness: frozenset[int]  # members of the worst cut
    n_checked: int
    n_nontrivial: int
    n_violations: int
    epsilon: float

    @property
    def passed(self) -> bool:
        return self.n_violations == 0


def cut_guarantee_check(
    graph: WeightedGraph,
    decomposition: Decomposition | WeightedGraph,
    epsilon: float,
    mode: Literal["exhaustive", "sampled"] = "exhaustive",
    samples: int = 10_000,
    seed: int = 0,
    rtol: float = 1e-9,
) -> CutReport:
    """Check ``1 - eps <= d_G'(S) / d_G(S) <= 1`` on every cut with ``d_G(S) >= W/2``.

    For ``eps >= 1`` only the upper bound is meaningful and the lower one
    is vacuous.
    """
    approx = decomposition.effective_graph() if isinstance(decomposition, Decomposition) else decomposition
    if approx.n != graph.n:
        raise ValueError("graphs have different vertex counts")
    n = graph.n
    if mode == "exhaustive":
        if n > 24:
            raise ValueError("exhaustive check limited to n <= 24")
        member = mask_bits(n, np.arange(1 << max(n - 1, 0), dtype=np.int64)).astype(bool)
        orig = enumerate_cut_values(graph)
        mod = enumerate_cut_values(approx)
    else:
        rng = np.random.default_rng(seed)
        member = rng.random((samples, n)) < 0.5
        orig = _cut_values(graph, member)
        mod = _cut_values(approx, member)
    half = 0.5 * graph.total_weight
    nontrivial = orig >= half * (1 - 1e-12)
    nontrivial &= orig > 0
    ratios = mod[nontrivial] / orig[nontrivial]
    lo = 1.0 - epsilon
    bad = (ratios > 1.0 + rtol) | (ratios < lo - rtol)
    if ratios.size:
        i = int(np.argmin(ratios))
        worst = float(ratios[i])
        witness = frozenset(np.flatnonzero(member[nontrivial][i]).tolist())
    else:
        worst, witness = 1.0, frozenset()
    return CutReport(worst, witness, int(member.shape[0]), int(ratios.size), int(bad.sum()), epsilon)


def _cut_values(graph: WeightedGraph, member: np.ndarray) -> np.ndarray:
    u, v, w = graph.arrays
    return (member[:, u] != member[:, v]) @ w


@dataclass(frozen=True)
class Selection:
    chosen: Decomposition
    schedule: PulseSchedule
    exp_pulses: int
    binary_pulses: int


def select_decomposition(graph: WeightedGraph, epsilon: float) -> Selection:
    """Compile both decompositions and keep the one with fewer pulses.

    Ties go to the binary decomposition.
    """
    exp_d = exp_decompose(graph, epsilon)
    bin_d = binary_decompose(graph, epsilon)
    exp_s = compile_decomposition(exp_d)
    bin_s = compile_decomposition(bin_d)
    if len(bin_s) <= len(exp_s):
        return Selection(bin_d, bin_s, len(exp_s), len(bin_s))
    return Selection(exp_d, exp_s, len(exp_s), len(bin_s))


@dataclass(frozen=True)
class SparseStarsResult:
    sparsified: WeightedGraph
    selection: Selection
    q: int
    epsilon2: float
    seed: int

    @property
    def decomposition(self) -> Decomposition:
        return self.selection.chosen

    @property
    def schedule(self) -> PulseSchedule:
        return self.selection.schedule

    @property
    def graph(self) -> WeightedGraph:
        return self.decomposition.effective_graph()

    @property
    def metrics(self) -> CompilationMetrics:
        return metrics(self.schedule)


def sparse_union_of_stars(
    graph: WeightedGraph,
    q: int | None,
    epsilon2: float,
    seed: int,
    epsilon1: float | None = None,
    c0: float = 1.0,
) -> SparseStarsResult:
    """Sparsify with ``q`` samples, decompose the sparsifier, compile the cheaper decomposition.

    When ``q`` is None it is derived from ``epsilon1`` via
    :func:`sample_count_for_epsilon`.
    """
    require_connected(graph)
    if q is None:
        if epsilon1 is None:
            raise ValueError("give either q or epsilon1")
        q = sample_count_for_epsilon(graph.n, epsilon1, c0)
    h = sparsify(graph, q, seed)
    return SparseStarsResult(h, select_decomposition(h, epsilon2), q, epsilon2, seed)
