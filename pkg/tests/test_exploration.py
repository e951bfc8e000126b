import math

import numpy as np
import pytest

from jigsaw import DoubleGraph, Graph, is_internally_spanned, percolates
from jigsaw.exploration import (BLUE, RED, ExplorationParams, LedgerViolation, RevealLedger,
                                doubling, one_by_one, run_three_stage,
                                third_sprinkle_completion)
from jigsaw.random_graphs import ERParams, SeedSpec, gen_sprinkles


def params_for(n, c):
    p = math.sqrt(c / (n * math.log(n)))
    return ERParams(n, p, p)


class TestLedger:
    def test_repeat_detected(self):
        led = RevealLedger(10)
        led.record(RED, [1, 2], [5])
        led.record(BLUE, [1], [5])
        led.check()
        led.record(RED, [5], [2])
        assert led.repeats() == 1
        with pytest.raises(LedgerViolation):
            led.check()

    def test_self_pair_rejected(self):
        with pytest.raises(LedgerViolation):
            RevealLedger(4).record(RED, [1], [1])

    def test_counts(self):
        led = RevealLedger(10)
        led.record(RED, [0, 1, 2], [7, 8])
        assert led.to_json() == {"queries": 6, "red": 6, "blue": 0}


def test_exploration_params_rounding():
    ep = ExplorationParams.for_n(4096, c=64)
    ln = math.log(4096)
    assert ep.t1 == math.ceil(ln ** 1.5)
    assert ep.k_cap == math.floor(4096 / (2 * ln ** 1.5))
    assert 1 <= ep.t0 <= ep.t1


class TestOneByOne:
    def test_red_path_complete_blue_reaches_t1(self):
        n = 200
        ep = ExplorationParams.for_n(n)
        dg = DoubleGraph(Graph.path(n), Graph.complete(n))
        res = one_by_one(dg, ep, check_invariants=True)
        assert res.success
        assert len(res.state.rounds) == 1
        assert res.witness.sorted() == list(range(1, ep.t1 + 1))
        res.ledger.check()

    def test_complete_graphs_discard_the_red_neighbourhood(self):
        # every active vertex is a red neighbour of the first trial vertex, so
        # all of them are discarded and each round stops at t = 2
        n = 200
        ep = ExplorationParams.for_n(n)
        g = Graph.complete(n)
        res = one_by_one(DoubleGraph(g, g), ep)
        assert not res.success
        assert res.state.rounds[0].final_t == 2

    def test_empty_red_fails_after_cap(self):
        n = 300
        ep = ExplorationParams.for_n(n)
        res = one_by_one(DoubleGraph(Graph(n), Graph.complete(n)), ep, check_invariants=True)
        assert not res.success
        assert len(res.state.rounds) == ep.k_cap
        assert all(r.final_t == 1 and r.steps[0].red_hits == 0 for r in res.state.rounds)

    @pytest.mark.parametrize("seed", range(6))
    def test_random_runs(self, seed):
        n = 512
        sp = gen_sprinkles(params_for(n, 64), SeedSpec(seed))
        ep = ExplorationParams.for_n(n, 64)
        res = one_by_one(sp.first, ep, check_invariants=True)
        res.ledger.check()
        for r in res.state.rounds:
            assert r.start_active * 2 >= n
        if res.success:
            assert res.witness.size == ep.t1
            assert is_internally_spanned(sp.first, res.witness.vertices)


class TestDoubling:
    def test_complete_sprinkle_doubles(self):
        n = 1024
        g = Graph.complete(n)
        dg = DoubleGraph(g, g)
        X0 = range(1, 11)
        res = doubling(dg, dg, X0)
        assert res.success and len(res.vertices) >= math.ceil(n / 16)
        xs = [s.x_t for s in res.state.steps]
        assert xs == [10 * 2 ** t for t in range(len(xs))]
        res.ledger.check()

    def test_empty_sprinkle_stops_at_zero(self):
        n = 256
        g = Graph.complete(n)
        res = doubling(DoubleGraph(g, g), DoubleGraph(Graph(n), Graph(n)), range(1, 5))
        assert not res.success and len(res.state.steps) == 1 and res.state.steps[0].t == 0

    def test_rejects_unspanned_start(self):
        n = 64
        dg = DoubleGraph(Graph(n), Graph(n))
        with pytest.raises(ValueError):
            doubling(dg, dg, [1, 2, 3])


class TestCompletion:
    def test_full_set(self):
        assert third_sprinkle_completion(range(1, 9), DoubleGraph(Graph(8), Graph(8)))

    def test_empty_sprinkle(self):
        assert not third_sprinkle_completion(range(1, 5), DoubleGraph(Graph(8), Graph(8)))

    def test_star_into_set(self):
        edges = [(1, v) for v in range(2, 9)]
        assert third_sprinkle_completion([1], DoubleGraph.from_edges(8, edges, edges))


class TestThreeStage:
    def test_no_red_edges(self):
        cert = run_three_stage(ERParams(64, 0.0, 0.5), SeedSpec(1))
        assert cert.failed_stage == 1 and not cert.success
        assert not percolates(gen_sprinkles(ERParams(64, 0.0, 0.5), SeedSpec(1)).union(3))

    def test_complete_graphs_fail_stage_one(self):
        cert = run_three_stage(ERParams(64, 1.0, 1.0), SeedSpec(1))
        assert cert.failed_stage == 1

    def test_dense_success_and_union(self):
        cert = run_three_stage(params_for(4096, 64), SeedSpec(2))
        assert cert.success and cert.union_percolates
        cert.check_ledgers()
        d = cert.to_json()
        assert d["success"] and d["failed_stage"] is None
