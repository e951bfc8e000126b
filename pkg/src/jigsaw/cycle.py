"""Jigsaw percolation with a G(n, p) red graph and the n-cycle as blue graph.

With the cycle as puzzle graph every cluster is an arc: two clusters share
a blue edge only when they are neighbouring arcs, and two neighbouring
arcs merge into an arc. So a round only asks, for each boundary between
neighbouring arcs X and K, whether some red edge joins X and K.

Red edges are revealed lazily. A boundary that survived the previous round
had its then-arcs X' and K' tested with no red edge found; arcs only grow,
so the pairs already known absent are exactly X' x K', and the fresh test
succeeds with probability 1 - (1 - p)^(|X||K| - |X'||K'|). Different
boundaries involve disjoint pair sets, so the tests are independent. This
reproduces the law of the full process without materialising ~p n^2/2
red edges. When only two arcs remain they touch at both boundaries and the
two known-absent rectangles are combined by inclusion-exclusion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import DoubleGraph, Graph
from .random_graphs import as_seed, gen_er
from .solver import final_labels


@dataclass(frozen=True)
class CycleOutcome:
    percolated: bool
    rounds: int
    largest: int


def _arc_mask(n: int, start: int, length: int) -> np.ndarray:
    m = np.zeros(n, dtype=bool)
    m[(start + np.arange(length)) % n] = True
    return m


def cycle_trial(n: int, p: float, seed) -> CycleOutcome:
    """One run of the cycle-puzzle process via lazy red-edge revelation.

    Only boundaries next to an arc that changed in the previous round have
    untested pairs, so each round touches just those; near criticality a
    run takes thousands of rounds in which only a few arcs grow.
    """
    if n < 3:
        dg = DoubleGraph(gen_er(n, p, seed), Graph.path(n))
        lab, rounds = final_labels(dg)
        sizes = np.bincount(lab)
        return CycleOutcome(bool(sizes.max() == n), rounds, int(sizes.max()))
    rng = as_seed(seed).rng()
    lp = math.log1p(-p) if p < 1 else -math.inf
    # arcs are keyed by their first vertex; boundary a sits between a and nxt[a]
    size = dict.fromkeys(range(n), 1)
    nxt = {i: (i + 1) % n for i in range(n)}
    prv = {i: (i - 1) % n for i in range(n)}
    # last failed test across boundary a: (left start, left size, right start, right size)
    known = {i: (i, 0, (i + 1) % n, 0) for i in range(n)}
    active = list(range(n))
    k = n
    rounds = 0
    while True:
        if k == 2:
            a = next(iter(size))
            b = nxt[a]
            ka, kb = known[a], known[b]
            return _two_arcs(n, lp, rng, np.array([a, b]), np.array([size[a], size[b]]),
                             np.array([ka[0], kb[0]]), np.array([ka[1], kb[1]]),
                             np.array([ka[2], kb[2]]), np.array([ka[3], kb[3]]), rounds)
        active.sort()
        draws = rng.random(len(active))
        hits = set()
        for a, u in zip(active, draws):
            b = nxt[a]
            fresh = size[a] * size[b] - known[a][1] * known[a][3]
            if fresh > 0 and u < -math.expm1(fresh * lp):
                hits.add(a)
            else:
                known[a] = (a, size[a], b, size[b])
        if not hits:
            return CycleOutcome(False, rounds, max(size.values()))
        rounds += 1
        k -= len(hits)
        if k <= 1:
            return CycleOutcome(True, rounds, n)
        lefts = [a for a in hits if prv[a] not in hits]
        for left in lefts:
            r, total = left, size[left]
            while r in hits:
                nb = nxt.pop(r)
                if r != left:
                    prv.pop(r)
                r = nb
                total += size.pop(r)
                rec = known.pop(r)
            # the chain's right boundary failed; its record carries over
            known[left] = rec
            size[left] = total
            after = nxt.pop(r)
            prv.pop(r)
            nxt[left], prv[after] = after, left
        touched = set(lefts)
        touched.update(prv[a] for a in lefts)
        active = list(touched)


def _two_arcs(n, lp, rng, start, size, l_start, l_size, r_start, r_size, rounds):
    X = _arc_mask(n, start[0], size[0])
    # boundary 0: left part of X, right part of K; boundary 1: the reverse
    a0 = _arc_mask(n, l_start[0], l_size[0])
    b0 = _arc_mask(n, r_start[0], r_size[0])
    a1 = _arc_mask(n, l_start[1], l_size[1])
    b1 = _arc_mask(n, r_start[1], r_size[1])
    assert not (a0 & ~X).any() and not (b1 & ~X).any()
    overlap = int((a0 & b1).sum()) * int((b0 & a1).sum())
    known = int(l_size[0] * r_size[0] + l_size[1] * r_size[1]) - overlap
    fresh = int(size[0] * size[1]) - known
    prob = 0.0 if fresh == 0 else -np.expm1(fresh * lp)
    if rng.random() < prob:
        return CycleOutcome(True, rounds + 1, n)
    return CycleOutcome(False, rounds, int(size.max()))


def cycle_trial_explicit(n: int, p: float, seed) -> CycleOutcome:
    """Same experiment with an explicit red graph and the general solver."""
    dg = DoubleGraph(gen_er(n, p, seed), Graph.cycle(n))
    lab, rounds = final_labels(dg)
    sizes = np.bincount(lab)
    return CycleOutcome(bool(sizes.max() == n), rounds, int(sizes.max()))
