import math

import numpy as np
import pytest

from sparsestars.graph import WeightedGraph, cut_value
from sparsestars.sparsify import (
    DisconnectedGraphError,
    effective_resistances,
    laplacian,
    sample_count_for_epsilon,
    sparsify,
)

from conftest import random_graph


def pinv_resistances(g):
    lp = np.linalg.pinv(laplacian(g))
    return np.array([lp[u, u] + lp[v, v] - 2 * lp[u, v] for u, v, _ in g.edges])


def test_single_edge_resistance():
    assert effective_resistances(WeightedGraph.from_edges(2, [(0, 1, 4.0)]))[0] == pytest.approx(0.25)


def test_triangle_resistance(k3):
    # one unit resistor in parallel with two in series
    np.testing.assert_allclose(effective_resistances(k3), [2 / 3] * 3, rtol=1e-12)


def test_tree_edges_have_resistance_one_over_weight():
    g = WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    np.testing.assert_allclose(effective_resistances(g), [1, 1], rtol=1e-12)


def test_matches_dense_pseudoinverse(rng):
    for _ in range(10):
        g = random_graph(rng, int(rng.integers(3, 30)), 0.3, connected=True)
        r = effective_resistances(g)
        np.testing.assert_allclose(r, pinv_resistances(g), rtol=1e-8)
        assert np.all(r > 0)
        assert np.all(r <= 1 / g.weights * (1 + 1e-9))


def test_disconnected_graph_names_components():
    g = WeightedGraph.from_edges(4, [(0, 1, 1), (2, 3, 1)])
    with pytest.raises(DisconnectedGraphError, match="vertex 0 and vertex 2"):
        effective_resistances(g)


def test_sparsify_single_edge():
    g = WeightedGraph.from_edges(2, [(0, 1, 3.0)])
    for q in (1, 5, 17):
        h = sparsify(g, q, seed=q)
        assert h.edges[0][:2] == (0, 1)
        assert h.edges[0][2] == pytest.approx(3.0, rel=1e-12)


def test_sparsify_triangle_total_weight(k3):
    for seed in range(5):
        h = sparsify(k3, 3, seed)
        assert h.total_weight == pytest.approx(3.0, rel=1e-12)
        assert all(w == pytest.approx(round(w)) for w in h.weights)


def test_sparsify_contract(rng):
    g = random_graph(rng, 25, 0.4, connected=True)
    for q in (10, 50, 500):
        h = sparsify(g, q, seed=7)
        assert h.n == g.n
        assert h.m <= min(q, g.m)
        assert h.edge_set() <= g.edge_set()
    assert sparsify(g, 50, seed=3) == sparsify(g, 50, seed=3)
    with pytest.raises(ValueError):
        sparsify(g, 0, seed=1)


def test_sample_count_examples():
    assert sample_count_for_epsilon(100, 1.0, 1.0) == 461
    assert sample_count_for_epsilon(2, 1.0, 1.0) == 2
    raw = lambda e: 1.0 * 50 * math.log(50) / e**2
    assert raw(0.25) / raw(0.5) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        sample_count_for_epsilon(10, 0.0)


def test_foster_identity(rng):
    for n in (5, 40, 120):
        g = random_graph(rng, n, 0.2, connected=True)
        assert float(g.weights @ effective_resistances(g)) == pytest.approx(n - 1, rel=1e-6)


def test_unbiased_total_weight():
    rng = np.random.default_rng(11)
    g = random_graph(rng, 20, 0.4, connected=True)
    totals = np.array([sparsify(g, 30, seed).total_weight for seed in range(1000)])
    se = totals.std(ddof=1) / math.sqrt(totals.size)
    assert abs(totals.mean() - g.total_weight) <= 3 * se


def test_random_cuts_preserved():
    rng = np.random.default_rng(5)
    n = 64
    g = random_graph(rng, n, 0.3, connected=True)
    q = math.ceil(4 * n * math.log(n))
    eps_hat = math.sqrt(4 * n * math.log(n) / q)
    h = sparsify(g, q, seed=9)
    ok = 0
    for _ in range(1000):
        s = rng.random(n) < 0.5
        ratio = cut_value(h, s) / cut_value(g, s)
        ok += 1 - 2 * eps_hat <= ratio <= 1 + 2 * eps_hat
    assert ok >= 950
