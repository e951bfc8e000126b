import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jigsaw import (DoubleGraph, EdgeListError, Graph, Partition, connected_components,
                    induce, is_connected, parse_edge_list, solve_fast)
from jigsaw.graph import format_edge_list, read_edge_list, write_edge_list

from conftest import double_graphs


@pytest.mark.parametrize("n, edges, blocks", [
    (3, [], [[1], [2], [3]]),
    (3, [(1, 2), (2, 3)], [[1, 2, 3]]),
    (5, [(1, 2), (3, 4)], [[1, 2], [3, 4], [5]]),
])
def test_components(n, edges, blocks):
    assert connected_components(Graph(n, edges)).blocks() == blocks


@pytest.mark.parametrize("g, expected", [
    (Graph.complete(4), True),
    (Graph(1), True),
    (Graph(3, [(1, 2)]), False),
])
def test_is_connected(g, expected):
    assert is_connected(g) is expected


def test_edges_are_canonical():
    g = Graph(4, [(3, 1), (4, 2)])
    assert g.edges() == [(1, 3), (2, 4)]
    assert g.has_edge(3, 1) and not g.has_edge(1, 2)
    assert g.neighbors(1) == [3]


@pytest.mark.parametrize("bad", [[(1, 1)], [(0, 2)], [(1, 5)], [(1, 2), (2, 1)]])
def test_graph_rejects(bad):
    with pytest.raises(ValueError):
        Graph(4, bad)


def test_named_graphs():
    assert Graph.complete(5).m == 10
    assert Graph.path(5).edges() == [(1, 2), (2, 3), (3, 4), (4, 5)]
    assert Graph.cycle(5).m == 5 and Graph.cycle(5).has_edge(1, 5)


@given(double_graphs(10))
def test_spanning_forest_inequality(dg):
    assert len(connected_components(dg.red)) + dg.red.m >= dg.n


def test_partition_union_counts():
    p = Partition(6)
    assert len(p) == 6
    assert p.union(1, 2) and len(p) == 5
    assert not p.union(2, 1) and len(p) == 5
    p.union(3, 4)
    p.union(2, 4)
    assert p.blocks() == [[1, 2, 3, 4], [5], [6]]
    assert p.same(1, 3) and not p.same(1, 5)
    assert Partition.from_labels(p.labels()) == p


@given(st.lists(st.tuples(st.integers(1, 8), st.integers(1, 8)), max_size=20))
def test_partition_count_decrements(pairs):
    p = Partition(8)
    for a, b in pairs:
        before = len(p)
        merged = p.union(a, b)
        assert len(p) == before - int(merged)


class TestInduce:
    def test_full_set_is_identity(self, hand_example):
        sub = induce(hand_example, range(1, 5))
        assert sub.graph.red == hand_example.red and sub.graph.blue == hand_example.blue

    def test_pair(self):
        dg = DoubleGraph.from_edges(6, [(2, 5), (1, 2)], [(3, 4)])
        sub = induce(dg, {2, 5})
        assert sub.graph.n == 2
        assert sub.graph.red.edges() == [(1, 2)] and sub.graph.blue.m == 0
        assert [sub.original(v) for v in (1, 2)] == [2, 5]

    def test_singleton(self, hand_example):
        sub = induce(hand_example, {3})
        assert sub.graph.n == 1 and sub.graph.red.m == 0

    def test_empty_rejected(self, hand_example):
        with pytest.raises(ValueError):
            induce(hand_example, [])

    @given(double_graphs(9))
    def test_full_induce_same_solution(self, dg):
        sub = induce(dg, range(1, dg.n + 1))
        assert solve_fast(sub.graph).final == solve_fast(dg).final


class TestEdgeList:
    TEXT = "4 3 3\nR 1 2\nR 1 3\nR 1 4\nB 1 2\nB 2 3\nB 3 4\n"

    def test_round_trip(self, hand_example, tmp_path):
        assert format_edge_list(hand_example) == self.TEXT
        assert parse_edge_list(self.TEXT) == hand_example
        path = tmp_path / "g.txt"
        write_edge_list(hand_example, path)
        assert read_edge_list(path) == hand_example

    @given(double_graphs(8))
    def test_round_trip_random(self, dg):
        assert parse_edge_list(format_edge_list(dg)) == dg

    @pytest.mark.parametrize("text, lineno", [
        ("3 1 0\nR 1 1\n", 2),
        ("3 1 0\nR 1 4\n", 2),
        ("3 1 0\nR 2 1\n", 2),
        ("3 2 0\nR 1 2\nR 1 2\n", 3),
        ("3 0 1\nR 1 2\n", 2),
        ("3 1 0\nR 1 x\n", 2),
        ("0 0 0\n", 1),
        ("3 2 0\nR 1 2\n", None),
    ])
    def test_rejects(self, text, lineno):
        with pytest.raises(EdgeListError) as info:
            parse_edge_list(text)
        if lineno is not None:
            assert info.value.lineno == lineno
            assert f"line {lineno}" in str(info.value)
