import io
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcd_influence.graph import (
    UNREACHABLE,
    EdgeListParseError,
    Graph,
    NodeLabelMap,
    bfs_distances,
    generate_ba,
    load_edge_list,
    write_edge_list,
)
from tests.oracles import floyd_warshall
from tests.strategies import graphs, path


def load(lines):
    return load_edge_list(io.StringIO("\n".join(lines) + "\n"))


def test_triangle():
    g, labels, diag = load(["0 1", "1 2", "2 0"])
    assert (g.node_count, g.edge_count) == (3, 3)
    assert g.degrees().tolist() == [2, 2, 2]
    assert diag.duplicate_edges == diag.self_loops == 0


def test_duplicates_and_self_loops_dropped():
    g, labels, diag = load(["a b", "b a", "a a"])
    assert (g.node_count, g.edge_count) == (2, 1)
    assert (diag.duplicate_edges, diag.self_loops) == (1, 1)
    assert labels.labels == ("a", "b")


def test_separators_and_comments():
    g, labels, _ = load(["# header", "% other", "", "x,y", "y   z", "z\tx", "w , x"])
    assert labels.labels == ("x", "y", "z", "w")
    assert g.edge_count == 4


def test_malformed_line_reports_number():
    with pytest.raises(EdgeListParseError) as e:
        load(["0 1", "1 2 3"])
    assert e.value.line_number == 2


def test_empty_input_is_empty_graph():
    g, labels, _ = load_edge_list(io.StringIO(""))
    assert g.node_count == 0 and g.edge_count == 0 and len(labels) == 0


def test_label_map_round_trip():
    lm = NodeLabelMap(("u7", "n2", "zz"))
    for i, lab in enumerate(lm.labels):
        assert lm.index(lab) == i and lm.label(i) == lab
    with pytest.raises(ValueError):
        NodeLabelMap(("a", "a"))


@given(graphs(max_nodes=15))
def test_invariants_and_round_trip(g):
    g.check_invariants()
    assert int(g.degrees().sum()) == 2 * g.edge_count
    buf = io.StringIO()
    write_edge_list(g, buf)
    g2, labels, _ = load_edge_list(io.StringIO(buf.getvalue()))
    # isolated nodes do not appear in an edge list
    assert {frozenset(labels.label(x) for x in e) for e in g2.edge_set()} == {
        frozenset(str(x) for x in e) for e in g.edge_set()
    }


def test_round_trip_with_labels():
    g, labels, _ = load(["alice bob", "bob carol", "carol alice", "dave alice"])
    buf = io.StringIO()
    write_edge_list(g, buf, labels)
    g2, labels2, _ = load_edge_list(io.StringIO(buf.getvalue()))
    named = lambda gr, lm: {frozenset(lm.label(x) for x in e) for e in gr.edge_set()}
    assert named(g, labels) == named(g2, labels2)


def test_ba_edge_count_at_benchmark_scale():
    g = generate_ba(2000, 5, 3)
    assert g.edge_count == 5 * (2000 - 5)
    assert 9975 <= g.edge_count <= 9985
    g.check_invariants()


def test_ba_forced_tree():
    g = generate_ba(3, 1, 0)
    assert g.edge_count == 2


def test_ba_deterministic_and_connected():
    a, b = generate_ba(300, 3, 42), generate_ba(300, 3, 42)
    assert a.edge_set() == b.edge_set()
    assert generate_ba(300, 3, 43).edge_set() != a.edge_set()
    assert not any(math.isinf(x) for x in bfs_distances(a, 0))


@pytest.mark.parametrize("n,m", [(3, 3), (2, 5), (5, 0)])
def test_ba_rejects_bad_args(n, m):
    with pytest.raises(ValueError):
        generate_ba(n, m, 0)


def test_bfs_examples():
    assert bfs_distances(path(3), 0).tolist() == [0, 1, 2]
    tri = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert sorted(bfs_distances(tri, 2).tolist()) == [0, 1, 1]
    two = Graph.from_edges(4, [(0, 1), (2, 3)])
    d = bfs_distances(two, 0)
    assert d[:2].tolist() == [0, 1]
    assert d[2] == UNREACHABLE and d[3] == UNREACHABLE
    with pytest.raises(ValueError):
        bfs_distances(two, 4)


@given(graphs(max_nodes=20), st.data())
def test_bfs_matches_floyd_warshall(g, data):
    src = data.draw(st.integers(0, g.node_count - 1))
    fw = floyd_warshall(g.node_count, g.edges())
    assert bfs_distances(g, src).tolist() == fw[src]


def test_relabel_permutes_edges():
    g = path(4)
    r = g.relabel([3, 2, 1, 0])
    assert r.edge_set() == {frozenset(e) for e in [(3, 2), (2, 1), (1, 0)]}
