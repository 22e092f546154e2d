import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsestars.graph import WeightedGraph
from sparsestars.noise import (
    NoiseParams,
    edge_triangle_split,
    fidelity_bound,
    fidelity_report,
    grid_axis,
    grid_search,
    is_triangle_free,
    measurement_bound,
    measurement_bound_raw,
    noisy_to_ideal_ratio,
    qaoa_cost_dephased,
    sparsified_fidelity,
    statevector_qaoa_cost,
)

from conftest import random_graph

PI = math.pi
EDGE = WeightedGraph.from_edges(2, [(0, 1, 1.0)])


def path(n, w=1.0):
    return WeightedGraph.from_edges(n, [(i, i + 1, w) for i in range(n - 1)])


def test_single_edge_value():
    # f = sin(4b) sin(2g) for one unit edge
    val = qaoa_cost_dephased(EDGE, EDGE, PI / 8, PI / 8)
    assert val == pytest.approx(math.sqrt(2) / 2, abs=1e-12)
    assert qaoa_cost_dephased(EDGE, EDGE, -PI / 4, PI / 8) == pytest.approx(-1.0, abs=1e-12)


def test_beta_zero_and_gamma_zero(rng):
    g = random_graph(rng, 6, 0.6)
    assert qaoa_cost_dephased(g, g, 0.7, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert qaoa_cost_dephased(g, g, 0.0, 0.4) == pytest.approx(0.0, abs=1e-12)


def test_negative_angle_decays_like_positive():
    noise = NoiseParams(0.5, t_unit=2.0)
    assert noise.time(-0.3) == noise.time(0.3)


def test_single_edge_decay():
    noise = NoiseParams(0.3, t_unit=2.0)
    g, b = 0.4, 0.2
    expected = math.exp(-0.3 * g * 2.0 / 2) * math.sin(4 * b) * math.sin(2 * g)
    assert qaoa_cost_dephased(EDGE, EDGE, g, b, noise) == pytest.approx(expected, rel=1e-12)


def test_triangle_term_vanishes_without_triangles(rng):
    for g in (EDGE, path(6), WeightedGraph.from_edges(5, [(0, i, 1.0 + i) for i in range(1, 5)])):
        assert is_triangle_free(g)
        _, tau = edge_triangle_split(g, g, 0.37, 0.61)
        assert tau == pytest.approx(0.0, abs=1e-14)
    k3 = WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
    assert not is_triangle_free(k3)
    assert abs(edge_triangle_split(k3, k3, 0.37, 0.61)[1]) > 1e-3


def test_split_sums_to_cost(rng):
    for _ in range(10):
        c = random_graph(rng, 7, 0.6)
        cp = random_graph(rng, 7, 0.6)
        g, b = rng.uniform(-PI, PI, 2)
        f, tau = edge_triangle_split(c, cp, g, b)
        assert f + tau == pytest.approx(qaoa_cost_dephased(c, cp, g, b), abs=1e-12)


def test_closed_form_matches_statevector(rng):
    for _ in range(15):
        n = int(rng.integers(2, 8))
        c = random_graph(rng, n, 0.7, lo=0.2, hi=3)
        cp = c if rng.random() < 0.5 else random_graph(rng, n, 0.7, lo=0.2, hi=3)
        g, b = rng.uniform(-PI, PI, 2)
        assert qaoa_cost_dephased(c, cp, g, b) == pytest.approx(statevector_qaoa_cost(c, cp, g, b), abs=1e-10)


def test_statevector_cap():
    big = path(15)
    with pytest.raises(ValueError):
        statevector_qaoa_cost(big, big, 0.1, 0.1)


def test_strong_dephasing_kills_cost(rng):
    g = random_graph(rng, 6, 0.7)
    val = qaoa_cost_dephased(g, g, 0.5, 0.3, NoiseParams(1e4, t_unit=10.0))
    assert val == pytest.approx(0.0, abs=1e-12)


def test_tree_dephasing_law():
    tree = WeightedGraph.from_edges(6, [(0, 1, 1.0), (0, 2, 2.0), (1, 3, 0.5), (1, 4, 1.5), (2, 5, 3.0)])
    for gam in (0.0, 0.1, 1.0):
        noise = NoiseParams(gam, t_unit=4.0)
        g, b = 0.3, 0.2
        expected = math.exp(-gam * g * 4.0 / 2) * qaoa_cost_dephased(tree, tree, g, b)
        assert qaoa_cost_dephased(tree, tree, g, b, noise) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.floats(-PI, PI), st.floats(-PI, PI), st.floats(0, 5), st.integers(0, 2**32 - 1))
def test_cost_bounded_by_weight(n, g, b, gam, seed):
    rng = np.random.default_rng(seed)
    c = random_graph(rng, n, 0.6)
    cp = random_graph(rng, n, 0.6)
    val = qaoa_cost_dephased(c, cp, g, b, NoiseParams(gam, t_unit=1.0))
    assert abs(val) <= c.total_weight + 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_optimum_rises_with_dephasing(n, seed):
    rng = np.random.default_rng(seed)
    c = random_graph(rng, n, 0.7)
    if c.m == 0:
        return
    opts = [grid_search(c, c, NoiseParams(gam, t_unit=1.0), step=0.05 * PI).argmin[2] for gam in (0, 0.5, 2.0)]
    assert opts[0] <= opts[1] + 1e-12 <= opts[2] + 2e-12
    assert opts[2] <= 0.0


def test_grid_axis_open_lower_end():
    ax = grid_axis(0.0, PI / 2, 0.01 * PI)
    assert len(ax) == 50
    assert ax[0] == pytest.approx(0.01 * PI) and ax[-1] == pytest.approx(PI / 2)
    with pytest.raises(ValueError):
        grid_axis(1.0, 1.0, 0.1)


def test_grid_search_reproducible_and_consistent(rng):
    c = random_graph(rng, 6, 0.6)
    noise = NoiseParams(0.1, t_unit=3.0)
    a = grid_search(c, c, noise, step=0.05 * PI)
    b = grid_search(c, c, noise, step=0.05 * PI)
    assert a.argmin == b.argmin and a.to_csv() == b.to_csv()
    g, be, v = a.argmin
    assert v == pytest.approx(qaoa_cost_dephased(c, c, g, be, noise), abs=1e-12)
    assert v == a.values.min()
    assert a.to_csv().splitlines()[0] == "gamma,beta,cost"
    assert a.optimal_time == pytest.approx(3.0 * g)


def test_unit_edge_grid_optimum_location():
    land = grid_search(EDGE, EDGE)
    g, b, v = land.argmin
    # 0.375*pi is not on the 0.01*pi grid; the two neighbouring beta values tie
    assert g == pytest.approx(0.25 * PI)
    assert b == pytest.approx(0.37 * PI)
    assert v == pytest.approx(-math.cos(0.02 * PI), abs=1e-12)


def test_noise_params_validation():
    with pytest.raises(ValueError):
        NoiseParams(-1.0)
    with pytest.raises(ValueError):
        NoiseParams(0.5)
    assert NoiseParams().time(2.0) == 0.0


def test_noisy_to_ideal_ratio():
    tree = path(5)
    ideal = grid_search(tree, tree, step=0.02 * PI)
    noisy = grid_search(tree, tree, NoiseParams(0.2, t_unit=2.0), step=0.02 * PI)
    r = noisy_to_ideal_ratio(noisy, ideal, triangle_free=True)
    assert 0 < r.ratio <= r.bound + 1e-9
    assert not r.violated
    assert r.bound == pytest.approx(math.exp(-0.2 * noisy.optimal_time / 2))


def test_fidelity_examples():
    rep = fidelity_report(0.999, 100, 20, 0.99)
    assert rep.F0 == pytest.approx(0.999**200, rel=1e-12)
    assert rep.F0 == pytest.approx(0.81865, abs=1e-5)
    assert rep.F0_prime == pytest.approx(0.999**40, rel=1e-12)
    assert rep.F0_prime == pytest.approx(0.96077, abs=1e-5)
    assert rep.M == math.ceil(math.log(0.01) / math.log(1 - rep.F0))
    assert sparsified_fidelity(rep.F0, 100, 20) >= rep.F0


def test_fidelity_edge_cases():
    assert fidelity_bound(1.0, 50) == 1.0
    assert measurement_bound_raw(1.0, 0.9) == 1.0
    assert measurement_bound(1.0, 0.9) == 1
    assert measurement_bound(0.999999, 0.5) == 1
    for bad in ((0.0, 10), (1.1, 10), (0.9, 0)):
        with pytest.raises(ValueError):
            fidelity_bound(*bad)
    with pytest.raises(ValueError):
        measurement_bound(0.5, 1.0)


def test_mismatched_vertex_counts():
    with pytest.raises(ValueError):
        qaoa_cost_dephased(EDGE, path(3), 0.1, 0.1)
