import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcd_influence.cascade import (
    CascadeConfig,
    draw_live_edges,
    spread_from_live,
    estimate_spread,
    exact_spread,
    run_cascade,
    simulate_once,
)
from mcd_influence.diversity import SeedSet
from mcd_influence.graph import Graph, connected_components
from tests.oracles import ic_distribution_by_coins
from tests.strategies import clique_edges, graphs, path

TRIANGLE = Graph.from_edges(3, clique_edges([0, 1, 2]))


def test_p_zero_infects_only_seeds():
    g = path(6)
    assert simulate_once(g, [2, 4], 0.0, np.random.default_rng(1)) == {2, 4}


@given(graphs(max_nodes=15), st.integers(0, 2**32 - 1))
def test_p_one_infects_seed_components(g, seed):
    seeds = [0]
    comp = next(c for c in connected_components(g) if 0 in c)
    assert simulate_once(g, seeds, 1.0, np.random.default_rng(seed)) == set(comp)


def test_path_distribution_by_enumeration():
    g = path(3)
    dist = ic_distribution_by_coins(3, g.edges(), [1], 0.1)
    assert dist == pytest.approx({1: 0.81, 2: 0.18, 3: 0.01}, abs=1e-12)
    rng = np.random.default_rng(2024)
    runs = 40_000
    counts = np.bincount([len(simulate_once(g, [1], 0.1, rng)) for _ in range(runs)], minlength=4)[1:]
    for size, c in zip((1, 2, 3), counts):
        p = dist[size]
        assert abs(c / runs - p) <= 5 * np.sqrt(p * (1 - p) / runs)


def test_result_contains_seeds():
    g = path(5)
    rng = np.random.default_rng(0)
    for _ in range(50):
        assert {0, 4} <= simulate_once(g, SeedSet((0, 4), 0.4), 0.3, rng)


def test_empty_seeds_rejected():
    with pytest.raises(ValueError):
        simulate_once(path(3), [], 0.5, np.random.default_rng(0))


@given(graphs(max_nodes=10), st.integers(0, 2**32 - 1), st.floats(0.05, 0.95))
def test_processing_order_does_not_matter(g, seed, p):
    rng = np.random.default_rng(seed)
    coins = {}
    for u, v in g.edges():
        coins[(u, v)] = rng.random() < p
        coins[(v, u)] = rng.random() < p

    def attempt(u, targets):
        return np.array([coins[(u, int(t))] for t in targets], dtype=bool)

    seeds = [0] if g.node_count < 3 else [0, g.node_count - 1]
    fwd = run_cascade(g, seeds, attempt)
    rev = run_cascade(g, seeds, attempt, reverse=True)
    assert np.array_equal(fwd, rev)


def test_exact_spread_examples():
    assert exact_spread(Graph.from_edges(2, [(0, 1)]), [0], 0.3) == pytest.approx(1.3, abs=1e-12)
    assert exact_spread(TRIANGLE, [0], 1.0) == pytest.approx(3.0, abs=1e-12)
    assert exact_spread(path(3), [0], 0.1) == pytest.approx(1.11, abs=1e-12)
    assert exact_spread(path(3), [1], 0.1) == pytest.approx(1.2, abs=1e-12)


def test_exact_spread_edge_budget():
    g = Graph.from_edges(8, clique_edges(range(8)))  # 28 edges
    with pytest.raises(ValueError):
        exact_spread(g, [0], 0.1)


def test_exact_matches_coin_enumeration():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 0), (2, 3)])
    dist = ic_distribution_by_coins(4, g.edges(), [0], 0.4)
    assert exact_spread(g, [0], 0.4) == pytest.approx(sum(k * w for k, w in dist.items()), abs=1e-12)


SMALL = [
    path(4),
    TRIANGLE,
    Graph.from_edges(5, [(0, i) for i in range(1, 5)]),
    Graph.from_edges(4, clique_edges(range(4))),
    Graph.from_edges(6, clique_edges([0, 1, 2]) + clique_edges([3, 4, 5]) + [(2, 3)]),
    Graph.from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (5, 6)]),
]


@pytest.mark.parametrize("g", SMALL)
def test_exact_spread_monotone_in_seeds_and_p(g):
    nodes = range(g.node_count)
    for p in (0.1, 0.5):
        for r in (1, 2):
            for seeds in itertools.combinations(nodes, r):
                base = exact_spread(g, seeds, p)
                for extra in nodes:
                    if extra not in seeds:
                        assert exact_spread(g, seeds + (extra,), p) >= base - 1e-12
    grid = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0]
    vals = [exact_spread(g, [0], p) for p in grid]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_estimate_close_to_exact():
    g = SMALL[4]
    cfg = CascadeConfig(0.3, 20_000, 5)
    out = estimate_spread(g, [0], cfg)
    assert abs(out.mean_infected - exact_spread(g, [0], 0.3)) <= 4 * out.std_error


def test_estimate_p_zero_scale_exact():
    g = path(10)
    out = estimate_spread(g, [1, 5, 7], CascadeConfig(0.0, 50, 3))
    assert out.mean_final_infected_scale == 3 / 10
    assert out.std_error == 0.0


def test_estimate_deterministic():
    g = Graph.from_edges(6, clique_edges(range(6)))
    cfg = CascadeConfig(0.2, 200, 11)
    a = estimate_spread(g, [0], cfg)
    b = estimate_spread(g, [0], cfg)
    assert a.per_run_infected_count == b.per_run_infected_count
    c = estimate_spread(g, [0], CascadeConfig(0.2, 200, 12))
    assert a.per_run_infected_count != c.per_run_infected_count


def test_outcome_invariants():
    g = Graph.from_edges(6, clique_edges(range(6)))
    out = estimate_spread(g, [0, 1], CascadeConfig(0.2, 300, 1))
    assert all(2 <= c <= 6 for c in out.per_run_infected_count)
    assert out.mean_final_infected_scale == pytest.approx(out.mean_infected / 6)


@pytest.mark.parametrize("kw", [{"activation_probability": 1.5}, {"runs": 0}, {"rng_seed": -1}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        CascadeConfig(**kw)


@given(graphs(max_nodes=12), st.integers(0, 2**32 - 1), st.floats(0.05, 0.95))
def test_live_edge_engine_matches_round_engine(g, seed, p):
    live = draw_live_edges(g, p, np.random.default_rng(seed))
    offsets, targets = g.csr
    slot = {(u, int(targets[i])): i for u in range(g.node_count) for i in range(offsets[u], offsets[u + 1])}

    def attempt(u, ts):
        return np.array([live[slot[(u, int(t))]] for t in ts], dtype=bool)

    assert np.array_equal(spread_from_live(g, [0], live), run_cascade(g, [0], attempt))


@given(graphs(min_nodes=3, max_nodes=15), st.integers(0, 2**16), st.floats(0.05, 0.6))
def test_shared_stream_is_monotone_in_nested_seeds(g, seed, p):
    cfg = CascadeConfig(p, 30, seed)
    small = estimate_spread(g, [0], cfg).per_run_infected_count
    big = estimate_spread(g, [0, 1, 2], cfg).per_run_infected_count
    assert all(b >= a for a, b in zip(small, big))
