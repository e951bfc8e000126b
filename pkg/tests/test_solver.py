import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jigsaw import (DoubleGraph, Graph, exhaustive_spanned, is_internally_spanned,
                    mutually_connected_clusters, percolates, solve_fast, solve_reference,
                    spanned_witness_from_history)
from jigsaw.solver import EXHAUSTIVE_MAX_N, cluster_graph, history_sets

from conftest import double_graphs, random_double

SOLVERS = [solve_reference, solve_fast]


@pytest.mark.parametrize("solve", SOLVERS)
class TestExamples:
    def test_hand_trace(self, solve, hand_example):
        res = solve(hand_example)
        assert res.percolates
        assert res.cluster_counts == [4, 3, 2, 1]
        assert [r.members for r in res.merge_trace] == [(1, 2), (1, 2, 3), (1, 2, 3, 4)]
        assert [r.clusters for r in res.merge_trace] == [(1, 2), (1, 3), (1, 4)]

    def test_identical_path(self, solve):
        path = Graph.path(4)
        res = solve(DoubleGraph(path, path))
        assert res.percolates and res.rounds == 1

    def test_edge_disjoint_stays_put(self, solve):
        dg = DoubleGraph(Graph.path(5), Graph(5, [(1, 3), (3, 5), (2, 5), (2, 4)]))
        res = solve(dg)
        assert res.rounds == 0 and len(res.final) == 5

    def test_single_vertex(self, solve):
        res = solve(DoubleGraph(Graph(1), Graph(1)))
        assert res.percolates and res.rounds == 0 and res.cluster_counts == [1]


def test_complete_large():
    g = Graph.complete(1000)
    res = solve_fast(DoubleGraph(g, g), trace=False)
    assert res.percolates and res.rounds == 1


@settings(max_examples=300)
@given(double_graphs(9))
def test_fast_matches_reference(dg):
    a, b = solve_reference(dg), solve_fast(dg)
    assert a.final == b.final
    assert a.cluster_counts == b.cluster_counts
    assert a.merge_trace == b.merge_trace


@pytest.mark.parametrize("n", [15, 25, 40])
@pytest.mark.parametrize("p", [0.05, 0.2, 0.5, 0.9])
def test_fast_matches_reference_random(rng, n, p):
    for _ in range(10):
        dg = random_double(rng, n, p, rng.uniform(0, 1))
        a, b = solve_reference(dg), solve_fast(dg)
        assert a.final == b.final and a.cluster_counts == b.cluster_counts


@given(double_graphs(9))
def test_counts_strictly_decrease(dg):
    res = solve_fast(dg)
    c = res.cluster_counts
    assert all(x > y for x, y in zip(c, c[1:]))
    assert res.rounds <= math.comb(dg.n, 2)


@settings(max_examples=150)
@given(double_graphs(8))
def test_trace_clusters_internally_spanned(dg):
    for rec in solve_fast(dg).merge_trace:
        assert is_internally_spanned(dg, rec.members)


@given(double_graphs(9), st.data())
def test_monotone_under_edge_addition(dg, data):
    pairs = list(itertools.combinations(range(1, dg.n + 1), 2))
    if not pairs:
        return
    e = data.draw(st.sampled_from(pairs))
    colour = data.draw(st.sampled_from(["red", "blue"]))
    red, blue = dg.red.edge_set(), dg.blue.edge_set()
    (red if colour == "red" else blue).add(frozenset(e))
    bigger = DoubleGraph.from_edges(dg.n, [tuple(x) for x in red], [tuple(x) for x in blue])
    assert not (percolates(dg) and not percolates(bigger))


def test_cluster_graph_matches_pair_scan(hand_example):
    cg = cluster_graph(hand_example, [[1, 2], [3], [4]])
    assert set(cg.edges) == {(1, 3)}


class TestSpanned:
    def test_singleton_and_pairs(self):
        dg = DoubleGraph.from_edges(3, [(1, 2), (2, 3)], [(1, 2)])
        assert is_internally_spanned(dg, {3})
        assert is_internally_spanned(dg, {1, 2})
        assert not is_internally_spanned(dg, {2, 3})
        with pytest.raises(ValueError):
            is_internally_spanned(dg, set())

    def test_witness_m1(self, hand_example):
        assert spanned_witness_from_history(hand_example, 1).size == 1
        assert exhaustive_spanned(hand_example, 1).size == 1

    def test_witness_full(self, hand_example):
        assert spanned_witness_from_history(hand_example, 4).vertices == frozenset(range(1, 5))

    def test_edge_disjoint_has_no_pair(self):
        dg = DoubleGraph(Graph.path(6), Graph(6, [(1, 3), (2, 5), (4, 6)]))
        assert exhaustive_spanned(dg, 2) is None
        assert spanned_witness_from_history(dg, 2) is None

    def test_exhaustive_guard(self):
        n = EXHAUSTIVE_MAX_N + 1
        with pytest.raises(ValueError):
            exhaustive_spanned(DoubleGraph(Graph(n), Graph(n)), 2)

    def test_history_sets_nested_under_final(self, hand_example):
        sets = list(history_sets(hand_example))
        assert frozenset({1, 2}) in sets and frozenset(range(1, 5)) in sets

    @settings(max_examples=200)
    @given(double_graphs(8), st.data())
    def test_witness_sound(self, dg, data):
        m = data.draw(st.integers(1, dg.n))
        w = spanned_witness_from_history(dg, m)
        if w is not None:
            assert w.size >= m
            assert is_internally_spanned(dg, w.vertices)
            assert exhaustive_spanned(dg, m) is not None

    @settings(max_examples=100)
    @given(double_graphs(7), st.data())
    def test_exhaustive_against_brute_force(self, dg, data):
        m = data.draw(st.integers(1, dg.n))
        found = exhaustive_spanned(dg, m)
        brute = any(is_internally_spanned(dg, U)
                    for k in range(m, dg.n + 1)
                    for U in itertools.combinations(range(1, dg.n + 1), k))
        assert (found is not None) == brute
        if found is not None:
            assert is_internally_spanned(dg, found.vertices)


class TestMutualClusters:
    def test_edge_disjoint_connected(self):
        dg = DoubleGraph(Graph.path(5), Graph(5, [(1, 3), (3, 5), (2, 5), (2, 4)]))
        assert mutually_connected_clusters(dg).blocks() == [[1, 2, 3, 4, 5]]
        assert len(solve_fast(dg).final) == 5

    def test_identical_components(self):
        g = Graph(4, [(1, 2), (3, 4)])
        assert mutually_connected_clusters(DoubleGraph(g, g)).blocks() == [[1, 2], [3, 4]]

    def test_refinement_needs_two_passes(self):
        dg = DoubleGraph.from_edges(3, [(1, 2), (2, 3)], [(1, 2)])
        assert mutually_connected_clusters(dg).blocks() == [[1, 2], [3]]

    @given(double_graphs(8))
    def test_blocks_connected_in_both(self, dg):
        for block in mutually_connected_clusters(dg).blocks():
            s = set(block)
            for g in (dg.red, dg.blue):
                seen, stack = {block[0]}, [block[0]]
                while stack:
                    for w in g.neighbors(stack.pop()):
                        if w in s and w not in seen:
                            seen.add(w)
                            stack.append(w)
                assert seen == s

    @given(double_graphs(8))
    def test_jigsaw_refines_mutual(self, dg):
        # every jigsaw cluster is connected in both colours, hence inside one mutual block
        mutual = mutually_connected_clusters(dg)
        for block in solve_fast(dg).final.blocks():
            assert all(mutual.same(block[0], v) for v in block)
