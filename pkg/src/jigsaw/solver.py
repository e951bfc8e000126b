"""Jigsaw percolation dynamics on a double graph.

Two solvers compute the same round-synchronous process:

* :func:`solve_reference` is a literal pure-Python rendering: per round it
  scans every edge to find which cluster pairs each colour touches, then
  scans every cluster pair, then takes components of the cluster graph.
* :func:`solve_fast` works on label arrays. Each round it re-keys the
  surviving cross-cluster edges of both colours by (cluster, cluster),
  intersects the two key sets to get the cluster-graph edges and merges
  the components. Intra-cluster edges are dropped for good once seen.

Cluster ids are always the smallest vertex of the cluster, so traces from
both solvers compare equal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

import numpy as np

from .graph import (ClusterGraph, DoubleGraph, Partition, component_labels0,
                    induce)

EXHAUSTIVE_MAX_N = 20


@dataclass(frozen=True)
class MergeRecord:
    round: int
    clusters: tuple[int, ...]  # ids of the clusters of C_t merged into one
    members: tuple[int, ...] = ()  # vertices of the resulting cluster

    def to_json(self) -> dict:
        return {"round": self.round, "clusters": list(self.clusters), "members": list(self.members)}


@dataclass
class SolveResult:
    final: Partition
    cluster_counts: list[int]
    merge_trace: list[MergeRecord] = field(default_factory=list)

    @property
    def rounds(self) -> int:
        """Number of rounds in which some clusters merged."""
        return len(self.cluster_counts) - 1

    @property
    def percolates(self) -> bool:
        return self.final.count == 1

    @property
    def largest(self) -> int:
        return max(len(b) for b in self.final.blocks())

    def to_json(self) -> dict:
        return {
            "percolates": self.percolates,
            "rounds": self.rounds,
            "cluster_counts": list(self.cluster_counts),
            "final_blocks": [list(b) for b in self.final.blocks()],
            "merge_trace": [r.to_json() for r in self.merge_trace],
        }


@dataclass(frozen=True)
class SpannedWitness:
    vertices: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.vertices)

    def sorted(self) -> list[int]:
        return sorted(self.vertices)


# --- reference solver -----------------------------------------------------

def cluster_graph(dg: DoubleGraph, clusters: list[list[int]]) -> ClusterGraph:
    """Gamma_t for the given clusters (each a sorted vertex list)."""
    where = {}
    for i, c in enumerate(clusters):
        for v in c:
            where[v] = i

    def touched(edges: Iterable[tuple[int, int]]) -> set[tuple[int, int]]:
        pairs = set()
        for u, v in edges:
            a, b = where[u], where[v]
            if a != b:
                pairs.add((a, b) if a < b else (b, a))
        return pairs

    red = touched(dg.red.edges())
    blue = touched(dg.blue.edges())
    ids = [c[0] for c in clusters]
    edges = [(ids[i], ids[j])
             for i, j in itertools.combinations(range(len(clusters)), 2)
             if (i, j) in red and (i, j) in blue]
    return ClusterGraph(ids, edges)


def solve_reference(dg: DoubleGraph) -> SolveResult:
    n = dg.n
    clusters = [[v] for v in range(1, n + 1)]
    counts = [n]
    trace: list[MergeRecord] = []
    t = 0
    while len(clusters) > 1:
        gamma = cluster_graph(dg, clusters)
        if not gamma.edges:
            break
        adj: dict[int, list[int]] = {c: [] for c in gamma.nodes}
        for a, b in gamma.edges:
            adj[a].append(b)
            adj[b].append(a)
        by_id = {c[0]: c for c in clusters}
        seen: set[int] = set()
        merged = []
        for start in gamma.nodes:
            if start in seen:
                continue
            comp, stack = [], [start]
            seen.add(start)
            while stack:
                c = stack.pop()
                comp.append(c)
                for d in adj[c]:
                    if d not in seen:
                        seen.add(d)
                        stack.append(d)
            comp.sort()
            members = sorted(v for c in comp for v in by_id[c])
            if len(comp) > 1:
                trace.append(MergeRecord(t, tuple(comp), tuple(members)))
            merged.append(members)
        clusters = sorted(merged, key=lambda b: b[0])
        counts.append(len(clusters))
        t += 1
    labels = np.empty(n, dtype=np.int64)
    for c in clusters:
        labels[np.asarray(c) - 1] = c[0]
    return SolveResult(Partition.from_labels(labels), counts, trace)


# --- fast solver ----------------------------------------------------------

def _cross_keys(lab: np.ndarray, e: np.ndarray, n: int):
    """Drop intra-cluster edges; return (surviving edges, unique cluster-pair keys)."""
    a = lab[e[:, 0]]
    b = lab[e[:, 1]]
    keep = a != b
    if not keep.all():
        e, a, b = e[keep], a[keep], b[keep]
    keys = np.minimum(a, b) * n + np.maximum(a, b)
    return e, np.unique(keys)


def _rounds(dg: DoubleGraph) -> Iterator[tuple[int, np.ndarray, np.ndarray, np.ndarray]]:
    """Yield ``(t, labels_t, gamma_keys, labels_{t+1})`` for each merging round.

    Labels are 0-based cluster ids (smallest 0-based member). ``gamma_keys``
    encodes Gamma_t edges as ``min_id * n + max_id``.
    """
    n = dg.n
    lab = np.arange(n, dtype=np.int64)
    red, blue = dg.red.edges0, dg.blue.edges0
    t = 0
    k = n
    while k > 1:
        red, rkeys = _cross_keys(lab, red, n)
        blue, bkeys = _cross_keys(lab, blue, n)
        if rkeys.size == 0 or bkeys.size == 0:
            return
        gk = np.intersect1d(rkeys, bkeys, assume_unique=True)
        if gk.size == 0:
            return
        # cluster ids are vertices, so Gamma_t can be componentised on [n]
        comp = component_labels0(n, np.column_stack([gk // n, gk % n]))
        new = comp[lab]
        yield t, lab, gk, new
        lab = new
        k = int(np.unique(lab).size)
        t += 1


def solve_fast(dg: DoubleGraph, trace: bool = True) -> SolveResult:
    n = dg.n
    counts = [n]
    records: list[MergeRecord] = []
    lab = np.arange(n, dtype=np.int64)
    for t, old, gk, new in _rounds(dg):
        lab = new
        counts.append(int(np.unique(lab).size))
        if trace:
            ends = np.unique(np.concatenate([gk // n, gk % n]))
            target = new[ends]
            order = np.lexsort((ends, target))
            ends, target = ends[order], target[order]
            cuts = np.flatnonzero(np.diff(target)) + 1
            by_label = np.argsort(new, kind="stable")
            sorted_lab = new[by_label]
            for grp in np.split(ends, cuts):
                c = new[grp[0]]
                lo, hi = np.searchsorted(sorted_lab, [c, c + 1])
                members = tuple(int(v) + 1 for v in np.sort(by_label[lo:hi]))
                records.append(MergeRecord(t, tuple(int(c) + 1 for c in grp), members))
    return SolveResult(Partition.from_labels(lab + 1), counts, records)


def final_labels(dg: DoubleGraph) -> tuple[np.ndarray, int]:
    """0-based final cluster ids and the number of merging rounds."""
    lab = np.arange(dg.n, dtype=np.int64)
    rounds = 0
    for _, _, _, new in _rounds(dg):
        lab = new
        rounds += 1
    return lab, rounds


def percolates(dg: DoubleGraph) -> bool:
    if dg.n == 1:
        return True
    lab, _ = final_labels(dg)
    return bool(np.all(lab == 0))


def is_internally_spanned(dg: DoubleGraph, U: Iterable[int]) -> bool:
    return percolates(induce(dg, U).graph)


# --- internally spanned witnesses ----------------------------------------

def history_sets(dg: DoubleGraph) -> Iterator[frozenset[int]]:
    """Every cluster that appears while solving ``dg``, with pairwise refinement.

    Singletons come first. For each component of each Gamma_t the clusters
    are merged two at a time along a BFS spanning tree, and every
    intermediate union is yielded; each is internally spanned.
    """
    n = dg.n
    for v in range(1, n + 1):
        yield frozenset((v,))
    for _, old, gk, new in _rounds(dg):
        members: dict[int, list[int]] = {}
        for v0, c in enumerate(old.tolist()):
            members.setdefault(c, []).append(v0 + 1)
        adj: dict[int, list[int]] = {}
        for key in gk.tolist():
            a, b = divmod(key, n)
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        done: set[int] = set()
        for root in sorted(adj):
            if root in done:
                continue
            done.add(root)
            acc = set(members[root])
            queue = [root]
            i = 0
            while i < len(queue):
                c = queue[i]
                i += 1
                for d in sorted(adj[c]):
                    if d not in done:
                        done.add(d)
                        queue.append(d)
                        acc.update(members[d])
                        yield frozenset(acc)


def _witness_key(s: frozenset[int]):
    return (len(s), sorted(s))


def spanned_witness_from_history(dg: DoubleGraph, m: int) -> Optional[SpannedWitness]:
    """Smallest history cluster of size at least ``m``, or None."""
    if not 1 <= m <= dg.n:
        raise ValueError(f"m must lie in 1..{dg.n}")
    best = None
    for s in history_sets(dg):
        if len(s) >= m and (best is None or _witness_key(s) < _witness_key(best)):
            best = s
            if len(s) == m:
                break
    return None if best is None else SpannedWitness(best)


def _mask_adjacency(dg: DoubleGraph) -> tuple[list[int], list[int]]:
    red = [0] * dg.n
    blue = [0] * dg.n
    for adj, g in ((red, dg.red), (blue, dg.blue)):
        for u, v in g.edges0.tolist():
            adj[u] |= 1 << v
            adj[v] |= 1 << u
    return red, blue


def _connected_within(mask: int, adj: list[int]) -> bool:
    start = mask & -mask
    reached = start
    frontier = start
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= adj[low.bit_length() - 1]
            f ^= low
        nxt &= mask & ~reached
        reached |= nxt
        frontier = nxt
    return reached == mask


def _percolates_mask(mask: int, red: list[int], blue: list[int]) -> bool:
    """Jigsaw process on the sub-double-graph induced by a vertex bitmask."""
    clusters = []
    m = mask
    while m:
        low = m & -m
        clusters.append(low)
        m ^= low
    while len(clusters) > 1:
        rn, bn = [], []
        for c in clusters:
            r = b = 0
            f = c
            while f:
                low = f & -f
                i = low.bit_length() - 1
                r |= red[i]
                b |= blue[i]
                f ^= low
            rn.append(r & mask)
            bn.append(b & mask)
        k = len(clusters)
        parent = list(range(k))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        linked = False
        for i in range(k):
            for j in range(i + 1, k):
                cj = clusters[j]
                if rn[i] & cj and bn[i] & cj:
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[rj] = ri
                    linked = True
        if not linked:
            return False
        groups: dict[int, int] = {}
        for i in range(k):
            r = find(i)
            groups[r] = groups.get(r, 0) | clusters[i]
        clusters = list(groups.values())
    return True


def exhaustive_spanned(dg: DoubleGraph, m: int) -> Optional[SpannedWitness]:
    """First internally spanned set of size >= m, by size then lexicographic order.

    Exponential in n; guarded to ``n <= 20``. Sets whose red or blue induced
    graph is disconnected are skipped before running the process on them,
    since such sets can never be internally spanned.
    """
    n = dg.n
    if n > EXHAUSTIVE_MAX_N:
        raise ValueError(f"exhaustive search is limited to n <= {EXHAUSTIVE_MAX_N}")
    if not 1 <= m <= n:
        raise ValueError(f"m must lie in 1..{n}")
    red, blue = _mask_adjacency(dg)
    for size in range(m, n + 1):
        for combo in itertools.combinations(range(n), size):
            mask = 0
            for i in combo:
                mask |= 1 << i
            if size > 1 and not (_connected_within(mask, red)
                                 and _connected_within(mask, blue)):
                continue
            if _percolates_mask(mask, red, blue):
                return SpannedWitness(frozenset(i + 1 for i in combo))
    return None


# --- contrast model -------------------------------------------------------

def _split(lab: np.ndarray, e: np.ndarray, n: int) -> np.ndarray:
    inside = e[lab[e[:, 0]] == lab[e[:, 1]]]
    return component_labels0(n, inside)


def mutually_connected_clusters(dg: DoubleGraph) -> Partition:
    """Coarsest partition whose blocks are connected in both colours.

    Starts from the single block V and alternately splits every block into
    its red components and its blue components until nothing changes.
    """
    n = dg.n
    lab = np.zeros(n, dtype=np.int64)
    k = 1
    while True:
        lab = _split(lab, dg.red.edges0, n)
        lab = _split(lab, dg.blue.edges0, n)
        k_new = int(np.unique(lab).size)
        if k_new == k:
            break
        k = k_new
    return Partition.from_labels(lab)
