"""Seeded Erdős–Rényi generation, double graphs and three-way sprinkling.

Seeding: a :class:`SeedSpec` is a (master, stream) pair. The generator for
it is PCG64 seeded with ``mix64(master, stream)``, where ``mix64`` is the
SplitMix64 finaliser applied to ``master + (stream + 1) * golden_gamma``.
Child specs (``spec.child(i)``) re-mix, so trial ``i`` of a batch, the red
and blue halves of a double graph, and the three sprinkles all get
distinct streams no matter how work is split across processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import DoubleGraph, Graph

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
SPARSE_CUTOFF = 0.1


def mix64(master: int, stream: int) -> int:
    """SplitMix64 avalanche of ``master + (stream + 1) * GOLDEN_GAMMA``."""
    z = (master + (stream + 1) * GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SeedSpec:
    master: int
    stream: int = 0

    def __post_init__(self):
        if not 0 <= self.master <= MASK64:
            raise ValueError("master seed must be a 64-bit unsigned integer")

    @property
    def key(self) -> int:
        return mix64(self.master, self.stream)

    def child(self, i: int) -> "SeedSpec":
        return SeedSpec(self.key, i)

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.key))

    def to_json(self) -> dict:
        return {"master": self.master, "stream": self.stream}


def as_seed(seed) -> SeedSpec:
    return seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))


@dataclass(frozen=True)
class ERParams:
    n: int
    p1: float
    p2: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        for name in ("p1", "p2"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} is not a probability")

    @classmethod
    def from_product(cls, n: int, q: float, p1: float | None = None) -> "ERParams":
        """Params with ``p1 * p2 = q``: symmetric by default, else fixed ``p1``."""
        if p1 is None:
            p = math.sqrt(q)
            return cls(n, p, p)
        if p1 <= 0:
            raise ValueError("fixed p1 must be positive")
        p2 = q / p1
        if p2 > 1:
            raise ValueError(f"q={q} needs p2={p2} > 1 at fixed p1={p1}")
        return cls(n, p1, p2)

    @property
    def q(self) -> float:
        return self.p1 * self.p2

    def to_json(self) -> dict:
        return {"n": self.n, "p1": self.p1, "p2": self.p2}


def pair_from_index(n: int, idx: np.ndarray) -> np.ndarray:
    """Map lexicographic pair indices ``0..C(n,2)-1`` to 0-based ``(i, j)``, i < j."""
    idx = np.asarray(idx, dtype=np.int64)
    # row i starts at i*(2n-i-1)/2; invert the quadratic, then fix float error
    b = 2 * n - 1
    i = np.floor((b - np.sqrt(b * b - 8.0 * idx)) / 2).astype(np.int64)
    i = np.clip(i, 0, max(n - 2, 0))
    start = i * (2 * n - i - 1) // 2
    over = start > idx
    while np.any(over):
        i[over] -= 1
        start = i * (2 * n - i - 1) // 2
        over = start > idx
    nxt = (i + 1) * (2 * n - i - 2) // 2
    under = nxt <= idx
    while np.any(under):
        i[under] += 1
        start = i * (2 * n - i - 1) // 2
        nxt = (i + 1) * (2 * n - i - 2) // 2
        under = nxt <= idx
    j = idx - start + i + 1
    return np.column_stack([i, j])


def _skip_indices(total: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Indices of successes among ``total`` Bernoulli(p) trials via geometric gaps."""
    chunks = []
    pos = -1
    while True:
        mean = (total - pos) * p
        draw = int(mean + 6 * math.sqrt(mean + 1) + 16)
        gaps = rng.geometric(p, size=draw)
        cs = pos + np.cumsum(gaps)
        if cs[-1] >= total:
            chunks.append(cs[cs < total])
            break
        chunks.append(cs)
        pos = int(cs[-1])
    return np.concatenate(chunks)


def gen_er(n: int, p: float, seed, method: str = "auto") -> Graph:
    """G(n, p) on vertices ``1..n``.

    ``method="skip"`` walks the lexicographic pair order with geometric gaps
    (cost ~ number of edges); ``"dense"`` thresholds one uniform per pair,
    which couples graphs drawn from the same seed at different ``p``.
    ``"auto"`` uses skipping for ``p <= SPARSE_CUTOFF``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} is not a probability")
    rng = as_seed(seed).rng()
    total = n * (n - 1) // 2
    if total == 0 or p == 0.0:
        return Graph.from_array0(n, np.empty((0, 2), dtype=np.int64))
    if method == "auto":
        method = "skip" if p <= SPARSE_CUTOFF else "dense"
    if method == "skip":
        idx = _skip_indices(total, p, rng)
    elif method == "dense":
        idx = np.flatnonzero(rng.random(total) < p)
    else:
        raise ValueError(f"unknown method {method!r}")
    return Graph.from_array0(n, pair_from_index(n, idx))


def gen_double(params: ERParams, seed, method: str = "auto") -> DoubleGraph:
    s = as_seed(seed)
    return DoubleGraph(gen_er(params.n, params.p1, s.child(0), method),
                       gen_er(params.n, params.p2, s.child(1), method))


@dataclass(frozen=True)
class Sprinkles:
    """Three independent double graphs on one vertex set and their unions."""

    parts: tuple[DoubleGraph, DoubleGraph, DoubleGraph]
    seed: SeedSpec

    @property
    def first(self) -> DoubleGraph:
        return self.parts[0]

    @property
    def second(self) -> DoubleGraph:
        return self.parts[1]

    @property
    def third(self) -> DoubleGraph:
        return self.parts[2]

    def union(self, upto: int = 3) -> DoubleGraph:
        """Union of sprinkles ``1..upto``."""
        g = self.parts[0]
        for h in self.parts[1:upto]:
            g = g.union(h)
        return g


def gen_sprinkles(params: ERParams, seed) -> Sprinkles:
    s = as_seed(seed)
    parts = tuple(gen_double(params, s.child(j)) for j in (1, 2, 3))
    return Sprinkles(parts, s)


@dataclass(frozen=True)
class RegimeReport:
    n: int
    p1: float
    p2: float
    c: float               # implied constant p1*p2*n*ln(n)
    conn_ratio: float      # min(p1, p2) * n / ln(n)
    conds: bool            # c*ln(n)/n <= min(p1, p2)
    conds2: bool           # min <= n^(-1/2) and max <= 1/ln(n)^2
    conn: bool             # conn_ratio >= conn_constant
    conn_constant: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def regime_check(params: ERParams, conn_constant: float = 1.0) -> RegimeReport:
    """Evaluate the implied constant and the standing conditions on (p1, p2).

    The product condition defines ``c`` exactly, so ``conds`` checks the
    ordering half: ``c ln n / n <= min(p1, p2)``. ``conn`` compares the
    connectivity ratio against ``conn_constant`` (1 is the connectivity
    threshold of G(n, p)); it is a separate knob because at desk-scale n
    the implied ``c`` is far larger than the ratio can be.
    """
    n = params.n
    if n < 3:
        raise ValueError("regime checks need n >= 3 so that ln(n) > 1")
    ln = math.log(n)
    lo, hi = sorted((params.p1, params.p2))
    c = params.p1 * params.p2 * n * ln
    ratio = lo * n / ln
    return RegimeReport(
        n=n, p1=params.p1, p2=params.p2, c=c, conn_ratio=ratio,
        conds=lo > 0 and c * ln / n <= lo,
        conds2=lo <= n ** -0.5 and hi <= 1 / ln ** 2,
        conn=ratio >= conn_constant,
        conn_constant=conn_constant,
    )
