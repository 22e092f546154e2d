"""Ground-truth and heuristic Max-Cut, and transfer ratios between instances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .graph import WeightedGraph, cut_value, enumerate_cut_values

EXACT_CAP = 24


@dataclass(frozen=True)
class CutResult:
    members: frozenset[int]
    value: float
    exact: bool

    def mask(self, n: int) -> np.ndarray:
        s = np.zeros(n, dtype=bool)
        s[list(self.members)] = True
        return s


def _members(mask: int, n: int) -> frozenset[int]:
    return frozenset(i for i in range(n) if (mask >> i) & 1)


def max_cut_exact(graph: WeightedGraph) -> CutResult:
    """Exhaustive optimum; among near-equal optima the smallest bitmask wins."""
    n = graph.n
    if n > EXACT_CAP:
        raise ValueError(f"exact Max-Cut is capped at n <= {EXACT_CAP} (got n={n})")
    if graph.m == 0:
        return CutResult(frozenset(), 0.0, True)
    values = enumerate_cut_values(graph)
    best = values.max()
    # summation order differs between cuts, so equal optima may differ in the last bits
    idx = int(np.argmax(values >= best - 1e-9 * max(best, 1.0)))
    members = _members(idx, n)
    return CutResult(members, cut_value(graph, members), True)


def local_search_cut(graph: WeightedGraph, restarts: int = 64, seed: int = 0) -> CutResult:
    """Best 1-flip local optimum over ``restarts`` random starting cuts.

    Each sweep flips the vertex with the largest gain until no flip gains.
    A 1-flip local optimum always cuts at least half the total weight.
    """
    n = graph.n
    if graph.m == 0:
        return CutResult(frozenset(), 0.0, False)
    adj = graph.adjacency()
    rng = np.random.default_rng(seed)
    tol = 1e-12 * graph.total_weight
    best_val, best_side = -1.0, None
    for _ in range(max(1, restarts)):
        side = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        field = adj @ side
        while True:
            gain = side * field
            i = int(np.argmax(gain))
            if gain[i] <= tol:
                break
            side[i] = -side[i]
            field += 2.0 * side[i] * adj[:, i]
        if side[n - 1] > 0:
            side = -side
        members = frozenset(np.flatnonzero(side > 0).tolist())
        val = cut_value(graph, members)
        if val > best_val + tol:
            best_val, best_side = val, members
    return CutResult(best_side, best_val, False)


def best_cut(graph: WeightedGraph, mode: Literal["exact", "heuristic"], restarts: int = 64, seed: int = 0) -> CutResult:
    if mode == "exact":
        return max_cut_exact(graph)
    if mode == "heuristic":
        return local_search_cut(graph, restarts, seed)
    raise ValueError(f"unknown oracle mode {mode!r}")


@dataclass(frozen=True)
class TransferResult:
    ratio: float
    transferred_value: float  # value in the original graph of the modified graph's best cut
    reference_value: float  # best known cut value of the original graph
    exact: bool


def transfer(
    original: WeightedGraph,
    modified: WeightedGraph,
    mode: Literal["exact", "heuristic"] = "exact",
    restarts: int = 64,
    seed: int = 0,
) -> TransferResult:
    if original.n != modified.n:
        raise ValueError("graphs have different vertex counts")
    s_mod = best_cut(modified, mode, restarts, seed)
    s_orig = best_cut(original, mode, restarts, seed)
    got = cut_value(original, s_mod.members)
    # heuristic references are lower bounds, so the transferred cut can beat them
    ref = max(s_orig.value, got)
    ratio = got / ref if ref > 0 else 1.0
    return TransferResult(ratio, got, ref, mode == "exact")


def approximation_ratio(
    original: WeightedGraph,
    modified: WeightedGraph,
    mode: Literal["exact", "heuristic"] = "exact",
    restarts: int = 64,
    seed: int = 0,
) -> float:
    """Value in ``original`` of the best cut of ``modified``, over the best cut of ``original``."""
    return transfer(original, modified, mode, restarts, seed).ratio
