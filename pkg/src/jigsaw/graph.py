"""Graph, double-graph and partition types.

Vertices are the integers ``1..n`` everywhere in the public API. Internally
edge arrays are stored 0-based as ``(m, 2)`` int64 arrays with ``u < v``,
sorted lexicographically, which is what the numpy-heavy solvers want.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cc


class EdgeListError(ValueError):
    """Raised when an edge-list file is malformed."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def _canonical(n: int, edges) -> np.ndarray:
    """Validate 1-indexed pairs and return sorted 0-based (m, 2) array."""
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edges must be a sequence of vertex pairs")
    if arr.min() < 1 or arr.max() > n:
        raise ValueError(f"edge endpoint outside 1..{n}")
    if np.any(arr[:, 0] == arr[:, 1]):
        raise ValueError("self-loops are not allowed")
    lo = np.minimum(arr[:, 0], arr[:, 1]) - 1
    hi = np.maximum(arr[:, 0], arr[:, 1]) - 1
    keys = lo * n + hi
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    if keys.size > 1 and np.any(keys[1:] == keys[:-1]):
        raise ValueError("duplicate edges are not allowed")
    return np.column_stack([lo[order], hi[order]])


class Graph:
    """Simple undirected graph on vertices ``1..n``.

    Construct from 1-indexed pairs with ``Graph(n, [(1, 2), ...])``. Use
    :meth:`from_array0` when you already hold a canonical 0-based array
    (that path skips validation and is what the generators use).
    """

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 1:
            raise ValueError("a graph needs at least one vertex")
        self.n = int(n)
        self._e = _canonical(self.n, list(edges) if not isinstance(edges, np.ndarray) else edges)

    @classmethod
    def from_array0(cls, n: int, e0: np.ndarray) -> "Graph":
        g = cls.__new__(cls)
        g.n = int(n)
        g._e = e0
        return g

    @property
    def edges0(self) -> np.ndarray:
        """0-based canonical edge array, shape ``(m, 2)``; treat as read-only."""
        return self._e

    @property
    def m(self) -> int:
        return int(self._e.shape[0])

    def edges(self) -> list[tuple[int, int]]:
        """Edges as sorted 1-indexed ``(u, v)`` tuples with ``u < v``."""
        return [(int(u) + 1, int(v) + 1) for u, v in self._e]

    def edge_set(self) -> set[frozenset[int]]:
        return {frozenset(e) for e in self.edges()}

    @cached_property
    def keys(self) -> np.ndarray:
        """Sorted int64 keys ``u*n + v`` (0-based, u < v)."""
        return self._e[:, 0] * self.n + self._e[:, 1]

    @cached_property
    def _csr(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.n
        if self.m == 0:
            return np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64)
        src = np.concatenate([self._e[:, 0], self._e[:, 1]])
        dst = np.concatenate([self._e[:, 1], self._e[:, 0]])
        order = np.lexsort((dst, src))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return indptr, dst[order]

    def neighbors0(self, v0: int) -> np.ndarray:
        """Sorted 0-based neighbours of the 0-based vertex ``v0``."""
        indptr, idx = self._csr
        return idx[indptr[v0]:indptr[v0 + 1]]

    def neighbors(self, v: int) -> list[int]:
        return [int(w) + 1 for w in self.neighbors0(v - 1)]

    def degree(self, v: int) -> int:
        indptr, _ = self._csr
        return int(indptr[v] - indptr[v - 1])

    def has_edge(self, u: int, v: int) -> bool:
        if u == v or not (1 <= u <= self.n and 1 <= v <= self.n):
            return False
        a, b = min(u, v) - 1, max(u, v) - 1
        key = a * self.n + b
        i = np.searchsorted(self.keys, key)
        return bool(i < self.keys.size and self.keys[i] == key)

    def union(self, other: "Graph") -> "Graph":
        if other.n != self.n:
            raise ValueError("vertex counts differ")
        keys = np.union1d(self.keys, other.keys)
        return Graph.from_array0(self.n, np.column_stack([keys // self.n, keys % self.n]))

    def __eq__(self, other) -> bool:
        return (isinstance(other, Graph) and self.n == other.n
                and np.array_equal(self._e, other._e))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    @classmethod
    def complete(cls, n: int) -> "Graph":
        iu = np.triu_indices(n, 1)
        return cls.from_array0(n, np.column_stack(iu).astype(np.int64))

    @classmethod
    def path(cls, n: int) -> "Graph":
        a = np.arange(n - 1, dtype=np.int64)
        return cls.from_array0(n, np.column_stack([a, a + 1]))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        if n < 3:
            return cls.path(n)
        a = np.arange(n - 1, dtype=np.int64)
        e = np.column_stack([a, a + 1])
        e = np.vstack([[0, n - 1], e])
        return cls.from_array0(n, e[np.lexsort((e[:, 1], e[:, 0]))])


@dataclass(frozen=True)
class DoubleGraph:
    """Vertex set ``1..n`` with a red ("people") and a blue ("puzzle") edge set."""

    red: Graph
    blue: Graph

    def __post_init__(self):
        if self.red.n != self.blue.n:
            raise ValueError("red and blue graphs must share the vertex set")

    @property
    def n(self) -> int:
        return self.red.n

    @classmethod
    def from_edges(cls, n: int, red=(), blue=()) -> "DoubleGraph":
        return cls(Graph(n, red), Graph(n, blue))

    def union(self, other: "DoubleGraph") -> "DoubleGraph":
        return DoubleGraph(self.red.union(other.red), self.blue.union(other.blue))

    def __repr__(self) -> str:
        return f"DoubleGraph(n={self.n}, red={self.red.m}, blue={self.blue.m})"


class Partition:
    """Disjoint-set forest over ``1..n`` (union by rank, path halving)."""

    def __init__(self, n: int):
        self.n = n
        self._parent = list(range(n + 1))
        self._rank = [0] * (n + 1)
        self.count = n

    @classmethod
    def from_labels(cls, labels: Sequence[int] | np.ndarray) -> "Partition":
        """Build from a length-n label array (0-based position = vertex - 1).

        Equal labels mean the same block; every vertex points straight at
        the smallest vertex of its block.
        """
        labels = np.asarray(labels)
        n = labels.size
        p = cls(n)
        _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
        # np.unique's first occurrence is the smallest vertex carrying the label
        roots = first[inv] + 1
        p._parent = [0] + roots.tolist()
        p.count = int(first.size)
        return p

    def find(self, v: int) -> int:
        parent = self._parent
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def union(self, a: int, b: int) -> bool:
        """Merge the blocks of ``a`` and ``b``; return False if already merged."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self._rank[ra] < self._rank[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        if self._rank[ra] == self._rank[rb]:
            self._rank[ra] += 1
        self.count -= 1
        return True

    def same(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)

    def labels(self) -> np.ndarray:
        """0-based array: entry ``v-1`` is the smallest vertex in v's block."""
        roots = np.array([self.find(v) for v in range(1, self.n + 1)], dtype=np.int64)
        mins = np.full(self.n + 1, self.n + 1, dtype=np.int64)
        np.minimum.at(mins, roots, np.arange(1, self.n + 1))
        return mins[roots]

    def blocks(self) -> list[list[int]]:
        """Blocks as sorted lists, ordered by smallest element."""
        out: dict[int, list[int]] = {}
        for v in range(1, self.n + 1):
            out.setdefault(self.find(v), []).append(v)
        return sorted(out.values(), key=lambda b: b[0])

    def canonical(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(b) for b in self.blocks())

    def __iter__(self) -> Iterator[list[int]]:
        return iter(self.blocks())

    def __len__(self) -> int:
        return self.count

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self.canonical() == other.canonical()

    def __repr__(self) -> str:
        return f"Partition(n={self.n}, blocks={self.count})"


@dataclass
class ClusterGraph:
    """The graph Gamma_t whose nodes are current cluster ids (smallest vertex)."""

    nodes: list[int]
    edges: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        for a, b in self.edges:
            if a == b:
                raise ValueError("cluster-graph edges join distinct clusters")


def component_labels0(n: int, e0: np.ndarray) -> np.ndarray:
    """Component id per 0-based vertex, where the id is the smallest member (0-based)."""
    if e0.shape[0] == 0:
        return np.arange(n, dtype=np.int64)
    adj = coo_matrix((np.ones(e0.shape[0], dtype=np.int8), (e0[:, 0], e0[:, 1])),
                     shape=(n, n))
    _, lab = _cc(adj, directed=False)
    mins = np.full(lab.max() + 1, n, dtype=np.int64)
    np.minimum.at(mins, lab, np.arange(n, dtype=np.int64))
    return mins[lab]


def connected_components(g: Graph) -> Partition:
    return Partition.from_labels(component_labels0(g.n, g.edges0))


def is_connected(g: Graph) -> bool:
    if g.n == 1:
        return True
    if g.m < g.n - 1:
        return False
    return connected_components(g).count == 1


@dataclass(frozen=True)
class Induced:
    """Result of :func:`induce`: the relabelled double graph plus the label map."""

    graph: DoubleGraph
    labels: tuple[int, ...]  # labels[i] is the original vertex now called i+1

    def original(self, v: int) -> int:
        return self.labels[v - 1]


def induce(dg: DoubleGraph, U: Iterable[int]) -> Induced:
    """Restrict ``dg`` to ``U`` and relabel to ``1..|U|`` by increasing label."""
    verts = sorted(set(int(u) for u in U))
    if not verts:
        raise ValueError("cannot induce on an empty vertex set")
    if verts[0] < 1 or verts[-1] > dg.n:
        raise ValueError(f"vertex set not contained in 1..{dg.n}")
    k = len(verts)
    newid = np.full(dg.n, -1, dtype=np.int64)
    newid[np.asarray(verts) - 1] = np.arange(k)

    def restrict(g: Graph) -> Graph:
        e = newid[g.edges0]
        e = e[(e[:, 0] >= 0) & (e[:, 1] >= 0)]
        # relabelling is monotone, so order and u<v are preserved
        return Graph.from_array0(k, e)

    return Induced(DoubleGraph(restrict(dg.red), restrict(dg.blue)), tuple(verts))


# --- edge-list text format -------------------------------------------------

def parse_edge_list(text: str) -> DoubleGraph:
    """Parse the ``n m_red m_blue`` / ``R u v`` / ``B u v`` format."""
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, toks) for i, toks in lines if toks]
    if not lines:
        raise EdgeListError("empty input", 1)
    lineno, head = lines[0]
    if len(head) != 3:
        raise EdgeListError("header must be 'n m_red m_blue'", lineno)
    try:
        n, m_red, m_blue = (int(x) for x in head)
    except ValueError:
        raise EdgeListError("header fields must be integers", lineno) from None
    if n < 1:
        raise EdgeListError("n must be at least 1", lineno)
    if m_red < 0 or m_blue < 0:
        raise EdgeListError("edge counts must be non-negative", lineno)
    body = lines[1:]
    if len(body) != m_red + m_blue:
        last = body[-1][0] if body else lineno
        raise EdgeListError(
            f"expected {m_red + m_blue} edge lines, found {len(body)}", last)
    seen = {"R": set(), "B": set()}
    out = {"R": [], "B": []}
    for idx, (lineno, toks) in enumerate(body):
        want = "R" if idx < m_red else "B"
        if len(toks) != 3:
            raise EdgeListError("edge line must be 'R u v' or 'B u v'", lineno)
        tag = toks[0]
        if tag != want:
            raise EdgeListError(f"expected a '{want}' line, got '{tag}'", lineno)
        try:
            u, v = int(toks[1]), int(toks[2])
        except ValueError:
            raise EdgeListError("endpoints must be integers", lineno) from None
        if u == v:
            raise EdgeListError(f"self-loop {u} {v}", lineno)
        if not (1 <= u <= n and 1 <= v <= n):
            raise EdgeListError(f"endpoint outside 1..{n}", lineno)
        if u > v:
            raise EdgeListError("endpoints must satisfy u < v", lineno)
        if (u, v) in seen[tag]:
            raise EdgeListError(f"duplicate edge {u} {v}", lineno)
        seen[tag].add((u, v))
        out[tag].append((u, v))
    return DoubleGraph(Graph(n, out["R"]), Graph(n, out["B"]))


def read_edge_list(path) -> DoubleGraph:
    with open(path) as fh:
        return parse_edge_list(fh.read())


def format_edge_list(dg: DoubleGraph) -> str:
    parts = [f"{dg.n} {dg.red.m} {dg.blue.m}\n"]
    parts.extend(f"R {u} {v}\n" for u, v in dg.red.edges())
    parts.extend(f"B {u} {v}\n" for u, v in dg.blue.edges())
    return "".join(parts)


def write_edge_list(dg: DoubleGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_edge_list(dg))
