import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcd_influence.cascade import CascadeOutcome
from mcd_influence.graph import Graph, generate_ba
from mcd_influence.metrics import (
    MetricCell,
    UndefinedDistance,
    avg_spreader_distance,
    final_infected_scale,
    time_ranking,
)
from mcd_influence.diversity import mcd_scores
from mcd_influence.leiden import leiden
from tests.oracles import floyd_warshall
from tests.strategies import clique_edges, graphs, path


def test_final_infected_scale_examples():
    assert final_infected_scale(CascadeOutcome((1, 1, 2, 1, 1), 3), 3) == pytest.approx(0.4)
    assert final_infected_scale(CascadeOutcome((5,) * 4, 100), 100) == 0.05
    assert final_infected_scale(CascadeOutcome((7, 7), 7), 7) == 1.0
    with pytest.raises(ValueError):
        final_infected_scale(CascadeOutcome((1,), 1), 0)


def test_avg_distance_examples():
    assert avg_spreader_distance(path(4), [0, 3]) == (3.0, 0)
    tri = Graph.from_edges(3, clique_edges([0, 1, 2]))
    assert avg_spreader_distance(tri, [0, 1, 2]) == (1.0, 0)
    two = Graph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(UndefinedDistance) as e:
        avg_spreader_distance(two, [0, 2])
    assert e.value.unreachable_pairs == 1
    with pytest.raises(ValueError):
        avg_spreader_distance(path(3), [1])


def test_unreachable_pairs_excluded():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (3, 4)])
    assert avg_spreader_distance(g, [0, 2, 3]) == (2.0, 2)


@given(graphs(min_nodes=2, max_nodes=14), st.data())
def test_distance_matches_floyd_and_order_free(g, data):
    seeds = data.draw(st.lists(st.integers(0, g.node_count - 1), min_size=2, max_size=6, unique=True))
    fw = floyd_warshall(g.node_count, g.edges())
    finite = [fw[a][b] for a, b in itertools.combinations(seeds, 2) if fw[a][b] != float("inf")]
    shuffled = data.draw(st.permutations(seeds))
    if not finite:
        with pytest.raises(UndefinedDistance):
            avg_spreader_distance(g, seeds)
        return
    mean, unreachable = avg_spreader_distance(g, seeds)
    assert mean == pytest.approx(sum(finite) / len(finite))
    assert unreachable == len(list(itertools.combinations(seeds, 2))) - len(finite)
    assert avg_spreader_distance(g, shuffled) == (mean, unreachable)
    assert mean >= 1


def test_adjacent_seed_pair_contributes_one():
    g = path(6)
    assert avg_spreader_distance(g, [2, 3]) == (1.0, 0)


def test_time_ranking_on_single_node():
    g = Graph.from_edges(1, [])
    stats = time_ranking(lambda gr: mcd_scores(gr, leiden(gr))[2], g, repetitions=5)
    assert len(stats.samples) == 5
    assert stats.min > 0
    assert stats.min <= stats.median <= stats.max


def test_time_ranking_validation():
    with pytest.raises(ValueError):
        time_ranking(lambda g: None, path(2), repetitions=0)


def test_metric_cell_row_blanks_undefined():
    row = MetricCell("MCD", "ds", 0.02, 0.1, None, 0, None).row()
    assert row == ["MCD", "ds", "0.02", "0.1", "", "0", ""]
