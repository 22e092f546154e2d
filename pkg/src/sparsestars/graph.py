"""Weighted graph model, cut arithmetic and instance I/O.

Vertices are dense integers ``0..n-1``. Instance files use the MQLib
edge-list layout (1-indexed vertices) and are shifted on load.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int, float]


class GraphFormatError(ValueError):
    """Raised when an instance file cannot be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class WeightedGraph:
    """Simple undirected graph with strictly positive edge weights.

    Build instances with :meth:`from_edges`, which canonicalizes pairs to
    ``u < v``, sums duplicates and drops zero-weight edges.
    """

    n: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        seen = set()
        for u, v, w in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"edge ({u}, {v}) is not canonical for n={self.n}")
            if not w > 0:
                raise ValueError(f"edge ({u}, {v}) has non-positive weight {w}")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence]) -> "WeightedGraph":
        acc: dict[tuple[int, int], float] = {}
        for e in edges:
            u, v = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if w < 0:
                raise ValueError(f"negative weight {w} on edge ({u}, {v})")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            key = (u, v) if u < v else (v, u)
            acc[key] = acc.get(key, 0.0) + w
        kept = tuple((u, v, w) for (u, v), w in sorted(acc.items()) if w > 0)
        return cls(n, kept)

    @classmethod
    def from_adjacency(cls, matrix: np.ndarray, atol: float = 0.0) -> "WeightedGraph":
        a = np.asarray(matrix, dtype=float)
        n = a.shape[0]
        iu, iv = np.triu_indices(n, 1)
        w = a[iu, iv]
        keep = np.abs(w) > atol
        return cls.from_edges(n, zip(iu[keep].tolist(), iv[keep].tolist(), w[keep].tolist()))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Edge endpoints and weights as parallel arrays ``(u, v, w)``."""
        if not self.edges:
            return (np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0))
        u, v, w = zip(*self.edges)
        return (np.array(u, dtype=np.int64), np.array(v, dtype=np.int64), np.array(w, dtype=float))

    @property
    def weights(self) -> np.ndarray:
        return self.arrays[2]

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    @property
    def max_weight(self) -> float:
        return float(self.weights.max()) if self.edges else 0.0

    @property
    def is_unweighted(self) -> bool:
        w = self.weights
        return bool(w.size == 0 or np.all(w == w[0]))

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        u, v, w = self.arrays
        a[u, v] = w
        a[v, u] = w
        return a

    def neighbors(self) -> list[list[int]]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v, _ in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return nbrs

    def edge_set(self) -> set[tuple[int, int]]:
        return {(u, v) for u, v, _ in self.edges}

    def scaled(self, alpha: float) -> "WeightedGraph":
        return sum_graphs([(alpha, self)])

    def unweighted(self) -> "WeightedGraph":
        return WeightedGraph(self.n, tuple((u, v, 1.0) for u, v, _ in self.edges))


@dataclass(frozen=True)
class Star:
    center: int
    leaves: frozenset[int]

    def __post_init__(self):
        if not self.leaves:
            raise ValueError("star needs at least one leaf")
        if self.center in self.leaves:
            raise ValueError("star center cannot be a leaf")

    def edges(self) -> list[tuple[int, int]]:
        return [tuple(sorted((self.center, x))) for x in sorted(self.leaves)]


def as_mask(n: int, cut) -> np.ndarray:
    """Boolean membership vector for a cut given as mask array, int bitmask or vertex iterable."""
    if isinstance(cut, np.ndarray) and cut.dtype == bool:
        if cut.shape != (n,):
            raise ValueError("membership vector has wrong length")
        return cut
    if isinstance(cut, (int, np.integer)):
        bits = int(cut)
        if bits < 0 or bits >> n:
            raise ValueError("bitmask has bits outside the vertex range")
        return np.array([(bits >> i) & 1 for i in range(n)], dtype=bool)
    mask = np.zeros(n, dtype=bool)
    for x in cut:
        if not 0 <= int(x) < n:
            raise ValueError(f"vertex {x} not in graph")
        mask[int(x)] = True
    return mask


def cut_value(graph: WeightedGraph, cut) -> float:
    """Total weight of edges with exactly one endpoint in ``cut``."""
    s = as_mask(graph.n, cut)
    u, v, w = graph.arrays
    return float(w[s[u] != s[v]].sum())


def mask_bits(n_bits: int, masks: np.ndarray) -> np.ndarray:
    return ((masks[:, None] >> np.arange(n_bits, dtype=np.int64)) & 1).astype(np.int8)


def enumerate_cut_values(graph: WeightedGraph) -> np.ndarray:
    """Cut values of all ``2**(n-1)`` cuts with vertex ``n-1`` outside ``S``.

    Entry ``i`` is the value of the cut whose members are the set bits of
    ``i``. Every cut appears once up to complement. The vertex set is split
    into a low and a high block so the cross-block contribution is a single
    matrix product instead of a per-cut loop.
    """
    n = graph.n
    if n <= 1:
        return np.zeros(1)
    free = n - 1
    lo = free // 2
    hi = free - lo
    adj = graph.adjacency()
    a_bits = mask_bits(lo, np.arange(1 << lo, dtype=np.int64)).astype(float)
    b_bits = mask_bits(hi, np.arange(1 << hi, dtype=np.int64)).astype(float)
    low = list(range(lo))
    high = list(range(lo, free))
    last = n - 1

    def internal(bits, idx):
        # cut weight inside a block, plus edges to the fixed vertex n-1
        if not idx:
            return np.zeros(bits.shape[0])
        sub = adj[np.ix_(idx, idx)]
        deg = sub.sum(axis=1)
        inner = bits @ deg - np.einsum("ij,jk,ik->i", bits, sub, bits)
        return inner + bits @ adj[idx, last]

    cross = adj[np.ix_(low, high)] if low and high else np.zeros((lo, hi))
    ra = a_bits @ cross.sum(axis=1) if lo else np.zeros(1)
    rb = b_bits @ cross.sum(axis=0) if hi else np.zeros(1)
    mixed = -2.0 * (a_bits @ cross @ b_bits.T)
    table = (internal(a_bits, low) + ra)[:, None] + (internal(b_bits, high) + rb)[None, :] + mixed
    # index = a + (b << lo): transpose so that the low block varies fastest
    return np.ascontiguousarray(table.T).reshape(-1)


def sum_graphs(terms: Sequence[tuple[float, WeightedGraph]]) -> WeightedGraph:
    """Weighted sum ``sum_i alpha_i * G_i`` over a shared vertex set."""
    if not terms:
        raise ValueError("need at least one term")
    n = terms[0][1].n
    acc: dict[tuple[int, int], float] = {}
    for alpha, g in terms:
        if g.n != n:
            raise ValueError(f"vertex counts differ: {g.n} != {n}")
        if alpha < 0:
            raise ValueError("coefficients must be nonnegative")
        for u, v, w in g.edges:
            acc[(u, v)] = acc.get((u, v), 0.0) + alpha * w
    return WeightedGraph(n, tuple((u, v, w) for (u, v), w in sorted(acc.items()) if w > 0))


def star_decompose(graph: WeightedGraph) -> list[Star]:
    """Partition the edges into stars centred at each edge's smaller endpoint."""
    leaves: dict[int, set[int]] = {}
    for u, v, _ in graph.edges:
        leaves.setdefault(u, set()).add(v)
    return [Star(c, frozenset(leaves[c])) for c in sorted(leaves)]


def normalize_weights(graph: WeightedGraph) -> tuple[WeightedGraph, float]:
    """Rescale so the mean edge weight is one; returns ``(graph, scale)``."""
    if graph.m == 0:
        raise ValueError("cannot normalize a graph without edges")
    scale = graph.m / graph.total_weight
    return WeightedGraph(graph.n, tuple((u, v, w * scale) for u, v, w in graph.edges)), scale


def parse_graph(text: str) -> WeightedGraph:
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, tok) for i, tok in lines if tok and not tok[0].startswith(("#", "%"))]
    if not lines:
        raise GraphFormatError("empty instance")
    lineno, header = lines[0]
    try:
        n, m = int(header[0]), int(header[1])
    except (ValueError, IndexError):
        raise GraphFormatError("header must be 'n m'", lineno) from None
    if n < 0 or m < 0:
        raise GraphFormatError("header values must be nonnegative", lineno)
    body = lines[1:]
    if len(body) != m:
        raise GraphFormatError(f"expected {m} edge lines, found {len(body)}", lineno)
    edges = []
    for lineno, tok in body:
        if len(tok) < 2 or len(tok) > 3:
            raise GraphFormatError("edge line must be 'u v w'", lineno)
        try:
            u, v = int(tok[0]), int(tok[1])
            w = float(tok[2]) if len(tok) == 3 else 1.0
        except ValueError:
            raise GraphFormatError(f"cannot parse {' '.join(tok)!r}", lineno) from None
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", lineno)
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphFormatError(f"vertex index out of range 1..{n}", lineno)
        if not np.isfinite(w) or w < 0:
            raise GraphFormatError(f"invalid weight {tok[2]}", lineno)
        edges.append((u - 1, v - 1, w))
    return WeightedGraph.from_edges(n, edges)


def load_graph(path: str | os.PathLike) -> WeightedGraph:
    with open(path) as fh:
        return parse_graph(fh.read())


def format_graph(graph: WeightedGraph) -> str:
    out = [f"{graph.n} {graph.m}"]
    out += [f"{u + 1} {v + 1} {w!r}" for u, v, w in graph.edges]
    return "\n".join(out) + "\n"


def save_graph(graph: WeightedGraph, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(graph))
