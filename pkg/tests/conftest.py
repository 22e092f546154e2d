import itertools

import numpy as np
import pytest

from sparsestars.graph import WeightedGraph
from sparsestars.sparsify import is_connected


def random_graph(rng, n, p=0.5, lo=0.1, hi=10.0, connected=False):
    iu, iv = np.triu_indices(n, 1)
    while True:
        keep = rng.random(iu.size) < p
        if not keep.any():
            keep[rng.integers(iu.size)] = True
        w = rng.uniform(lo, hi, int(keep.sum()))
        g = WeightedGraph.from_edges(n, zip(iu[keep].tolist(), iv[keep].tolist(), w.tolist()))
        if not connected or is_connected(g):
            return g


def brute_cut_values(g):
    """All cut values, indexed by membership bitmask, via explicit loops."""
    out = []
    for bits in itertools.product([0, 1], repeat=g.n):
        side = bits[::-1]  # side[i] is bit i of the mask
        out.append(sum(w for u, v, w in g.edges if side[u] != side[v]))
    return np.array(out)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def k3():
    return WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
