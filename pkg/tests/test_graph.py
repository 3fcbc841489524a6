import math

import pytest

from geomcluster.graph import (
    INF,
    DuplicateEdgeError,
    EdgeListError,
    Graph,
    MalformedLineError,
    SelfLoopError,
    VertexRangeError,
    dump_edge_list,
    gen_grid,
    gen_path,
    gen_random,
    gen_star,
    gen_tree,
    load_edge_list,
    parse_gen_spec,
    sssp,
)


def test_load_single_edge():
    g = load_edge_list("2 1\n0 1")
    assert g.n == 2 and g.edges == ((0, 1, 1),)


def test_load_isolated_vertex():
    g = load_edge_list("1 0")
    assert g.n == 1 and g.m == 0


def test_load_weighted_triangle():
    g = load_edge_list("3 3\n0 1 2\n1 2 5\n0 2 1")
    assert set(g.edges) == {(0, 1, 2), (1, 2, 5), (0, 2, 1)}
    assert g.weight(2, 1) == 5 and not g.is_unweighted


def test_load_comments_and_reversed_edges():
    g = load_edge_list("# header next\n3 2\n\n2 0  # reversed\n1 2\n")
    assert g.edges == ((0, 2, 1), (1, 2, 1))


@pytest.mark.parametrize(
    "text, exc, line",
    [
        ("2 1\n0 x", MalformedLineError, 2),
        ("2 1\n0 1 2 3", MalformedLineError, 2),
        ("2 1\n0 1 0", MalformedLineError, 2),
        ("2 1\n0 2", VertexRangeError, 2),
        ("3 2\n0 1\n1 0", DuplicateEdgeError, 3),
        ("2 1\n1 1", SelfLoopError, 2),
        ("3 1\n0 1\n1 2", MalformedLineError, 3),
        ("", MalformedLineError, 1),
        ("x y", MalformedLineError, 1),
    ],
)
def test_parse_errors_name_the_line(text, exc, line):
    with pytest.raises(exc) as info:
        load_edge_list(text)
    assert isinstance(info.value, EdgeListError)
    assert info.value.lineno == line
    assert f"line {line}" in str(info.value)


def test_error_kinds_are_distinct():
    kinds = {MalformedLineError, VertexRangeError, DuplicateEdgeError, SelfLoopError}
    assert len(kinds) == 4
    for a in kinds:
        for b in kinds - {a}:
            assert not issubclass(a, b)


def test_dump_roundtrip():
    g = gen_random(30, 0.2, 5, seed=3)
    assert load_edge_list(dump_edge_list(g)) == g
    u = gen_random(30, 0.2, 1, seed=3)
    assert dump_edge_list(u).splitlines()[1].count(" ") == 1


def test_json_roundtrip():
    g = gen_grid(3, 4, 3, seed=2)
    assert Graph.from_json(g.to_json()) == g


def test_gen_random_extremes():
    k4 = gen_random(4, 1.0, 1, seed=7)
    assert k4.m == 6 and k4.is_unweighted
    empty = gen_random(5, 0.0, 1, seed=7)
    assert empty.n == 5 and empty.m == 0


def test_gen_random_deterministic():
    assert gen_random(50, 0.2, 3, seed=1) == gen_random(50, 0.2, 3, seed=1)
    assert gen_random(50, 0.2, 3, seed=1) != gen_random(50, 0.2, 3, seed=2)
    assert {w for _, _, w in gen_random(50, 0.5, 3, seed=1).edges} == {1, 2, 3}


def test_other_generators():
    assert gen_grid(8, 8).m == 2 * 8 * 7
    assert gen_path(5).edges == tuple((i, i + 1, 1) for i in range(4))
    star = gen_star(5)
    assert star.degree(0) == 4 and all(star.degree(v) == 1 for v in range(1, 5))
    tree = gen_tree(40, seed=3)
    assert tree.m == 39 and len(set(tree.components())) == 1


@pytest.mark.parametrize(
    "spec, n, m",
    [("er:4:1", 4, 6), ("grid:3:2", 6, 7), ("path:5", 5, 4), ("star:6", 6, 5), ("tree:9:1", 9, 8),
     ("er:1:0", 1, 0), ("grid:2:2:3:9", 4, 4)],
)
def test_parse_gen_spec(spec, n, m):
    g = parse_gen_spec(spec)
    assert (g.n, g.m) == (n, m)


@pytest.mark.parametrize("spec", ["nope:3", "er:3", "path:x", "er:3:2.0", "grid:0:3"])
def test_parse_gen_spec_rejects(spec):
    with pytest.raises(ValueError):
        parse_gen_spec(spec)


def test_sssp_examples():
    assert sssp(gen_path(3), 0) == [0, 1, 2]
    tri = load_edge_list("3 3\n0 1 2\n1 2 5\n0 2 1")
    assert sssp(tri, 0) == [0, 2, 1]
    two = load_edge_list("4 2\n0 1\n2 3")
    d = sssp(two, 0)
    assert d[:2] == [0, 1] and d[2] == INF and math.isinf(d[3])


def test_components_and_unweighted_view():
    g = load_edge_list("5 2\n3 4 2\n1 2 7")
    assert g.components() == [0, 1, 1, 3, 3]
    assert g.unweighted().edges == ((1, 2, 1), (3, 4, 1))
    assert g.w_max == 7


def test_invalid_graph_construction():
    with pytest.raises(ValueError):
        Graph(0, ())
