"""Cut sparsification by effective-resistance importance sampling."""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .graph import WeightedGraph


_CHUNK = 1 << 20


class DisconnectedGraphError(ValueError):
    def __init__(self, a: int, b: int, n_components: int):
        self.witness = (a, b)
        super().__init__(
            f"graph is disconnected ({n_components} components); "
            f"vertex {a} and vertex {b} lie in different components"
        )


def components(graph: WeightedGraph) -> np.ndarray:
    u, v, w = graph.arrays
    mat = coo_matrix((np.ones_like(w), (u, v)), shape=(graph.n, graph.n))
    _, labels = connected_components(mat, directed=False)
    return labels


def is_connected(graph: WeightedGraph) -> bool:
    return graph.n <= 1 or bool(np.all(components(graph) == 0))


def require_connected(graph: WeightedGraph) -> None:
    labels = components(graph)
    if np.any(labels != 0):
        b = int(np.argmax(labels != 0))
        raise DisconnectedGraphError(0, b, int(labels.max()) + 1)


def laplacian(graph: WeightedGraph) -> np.ndarray:
    adj = graph.adjacency()
    return np.diag(adj.sum(axis=1)) - adj


def effective_resistances(graph: WeightedGraph) -> np.ndarray:
    """Effective resistance across every edge, aligned with ``graph.edges``.

    Uses the dense identity ``L+ = (L + J/n)^-1 - J/n`` which holds for a
    connected graph, where ``J`` is the all-ones matrix.
    """
    if graph.n < 2:
        raise ValueError("need at least two vertices")
    require_connected(graph)
    n = graph.n
    shift = np.full((n, n), 1.0 / n)
    pinv = np.linalg.inv(laplacian(graph) + shift) - shift
    u, v, _ = graph.arrays
    return pinv[u, u] + pinv[v, v] - 2.0 * pinv[u, v]


def sampling_probabilities(graph: WeightedGraph, resistances: np.ndarray | None = None) -> np.ndarray:
    r = effective_resistances(graph) if resistances is None else resistances
    lev = graph.weights * r
    return lev / lev.sum()


def sparsify(graph: WeightedGraph, q: int, seed: int) -> WeightedGraph:
    """Draw ``q`` edges with replacement, ``p_e ~ c_e r_e``, each adding ``c_e / (q p_e)``."""
    if q < 1:
        raise ValueError("sample count q must be at least 1")
    if graph.m == 0:
        raise ValueError("graph has no edges")
    p = sampling_probabilities(graph)
    cdf = np.cumsum(p)
    rng = np.random.default_rng(seed)
    counts = np.zeros(graph.m, dtype=np.int64)
    for start in range(0, q, _CHUNK):
        draws = rng.random(min(_CHUNK, q - start)) * cdf[-1]
        idx = np.minimum(np.searchsorted(cdf, draws, side="right"), graph.m - 1)
        counts += np.bincount(idx, minlength=graph.m)
    w = graph.weights
    new_w = counts * (w / (q * p))
    edges = tuple(
        (u, v, float(c)) for (u, v, _), c, k in zip(graph.edges, new_w, counts) if k > 0
    )
    return WeightedGraph(graph.n, edges)


def sample_count_for_epsilon(n: int, epsilon: float, c0: float = 1.0) -> int:
    """``ceil(c0 * n * ln n / epsilon**2)``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if c0 <= 0:
        raise ValueError("c0 must be positive")
    return max(1, math.ceil(c0 * n * math.log(n) / epsilon**2))
