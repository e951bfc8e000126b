"""Edge-revealing exploration algorithms that grow internally spanned sets.

Three stages, each run on its own sprinkle:

1. :func:`one_by_one` grows a trial set one vertex at a time on sprinkle 1.
   A new vertex needs a red edge to the most recently added trial vertex
   and a blue edge to any trial vertex. Rounds that get stuck discard
   their trial set permanently.
2. :func:`doubling` grows that set on sprinkle 2, adding vertices that have
   a red and a blue edge into the newest layer, doubling its size per step.
3. :func:`third_sprinkle_completion` checks that every remaining vertex has
   a red and a blue sprinkle-3 edge into the stage-2 set.

Every potential edge the algorithms look at is written to a
:class:`RevealLedger`, which can prove afterwards that no (colour, pair)
query was made twice.

Arbitrary choices are resolved by smallest vertex label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .graph import DoubleGraph
from .random_graphs import ERParams, RegimeReport, SeedSpec, as_seed, gen_sprinkles, regime_check
from .solver import SpannedWitness, is_internally_spanned, percolates

RED, BLUE = 0, 1


class LedgerViolation(RuntimeError):
    """A (colour, pair) query was revealed twice."""


class RevealLedger:
    """Append-only record of revealed (colour, vertex pair) queries.

    Queries are buffered as numpy key arrays (``min*n + max``, 0-based) so
    that recording a whole row of pairs costs one array append.
    """

    def __init__(self, n: int):
        self.n = n
        self._keys: dict[int, list[np.ndarray]] = {RED: [], BLUE: []}
        self.queries = 0

    def record(self, colour: int, us: np.ndarray, vs) -> None:
        """Record the pairs ``(us[i], vs[j])`` for all i, j (0-based vertices)."""
        us = np.asarray(us, dtype=np.int64).ravel()
        vs = np.asarray(vs, dtype=np.int64).ravel()
        if us.size == 0 or vs.size == 0:
            return
        a = np.repeat(us, vs.size)
        b = np.tile(vs, us.size)
        if np.any(a == b):
            raise LedgerViolation("a query must involve two distinct vertices")
        keys = np.minimum(a, b) * self.n + np.maximum(a, b)
        self._keys[colour].append(keys)
        self.queries += int(keys.size)

    def keys(self, colour: int) -> np.ndarray:
        parts = self._keys[colour]
        return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)

    def repeats(self) -> int:
        """Number of queries that duplicate an earlier one (same colour)."""
        total = 0
        for c in (RED, BLUE):
            k = self.keys(c)
            total += int(k.size - np.unique(k).size)
        return total

    def check(self) -> None:
        dup = self.repeats()
        if dup:
            raise LedgerViolation(f"{dup} repeated (colour, pair) queries")

    def to_json(self) -> dict:
        return {"queries": self.queries,
                "red": int(sum(k.size for k in self._keys[RED])),
                "blue": int(sum(k.size for k in self._keys[BLUE]))}


@dataclass(frozen=True)
class ExplorationParams:
    n: int
    t0: int
    t1: int
    k_cap: int

    @classmethod
    def for_n(cls, n: int, c: float | None = None) -> "ExplorationParams":
        """Stage-1 thresholds; ``t0`` needs the implied constant ``c``.

        Thresholds to be reached are rounded up, resource caps down.
        """
        if n < 3:
            raise ValueError("exploration needs n >= 3")
        ln = math.log(n)
        t1 = math.ceil(ln ** 1.5)
        k_cap = math.floor(n / (2 * ln ** 1.5))
        if c is None or c <= 0:
            t0 = t1
        else:
            t0 = min(t1, max(1, math.ceil(ln / c)))
        return cls(n, t0, t1, k_cap)

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class StepTrace:
    t: int
    active: int      # |A_k^t| before the reveal
    red_hits: int    # |R_k^t|
    blue_hits: int   # |B_k^t|
    within_cap: bool  # |R_k^t| <= n/(4t)


@dataclass
class RoundTrace:
    k: int
    start_active: int
    steps: list[StepTrace] = field(default_factory=list)
    trial: list[int] = field(default_factory=list)  # 1-indexed x_k^1, x_k^2, ...

    @property
    def final_t(self) -> int:
        return len(self.steps)

    def to_json(self, verbose: bool = False) -> dict:
        d = {"k": self.k, "final_t": self.final_t, "start_active": self.start_active,
             "R": [s.red_hits for s in self.steps], "B": [s.blue_hits for s in self.steps]}
        if verbose:
            d["trial"] = list(self.trial)
            d["active"] = [s.active for s in self.steps]
            d["within_cap"] = [s.within_cap for s in self.steps]
        return d


@dataclass
class OneByOneState:
    """State of the 1-by-1 algorithm; ``rounds`` keeps the full history."""

    n: int
    k: int = 0
    t: int = 0
    trial: list[int] = field(default_factory=list)        # X_k^t, 0-based, in order
    active: np.ndarray | None = None                        # A_k^t mask
    round_discard: np.ndarray | None = None                 # D_k^t mask
    discarded: np.ndarray | None = None                     # D_k mask
    rounds: list[RoundTrace] = field(default_factory=list)

    def check_partition(self, round_set: np.ndarray) -> None:
        trial = np.zeros(self.n, dtype=bool)
        trial[self.trial] = True
        parts = trial.astype(int) + self.active + self.round_discard
        if np.any(parts[round_set] != 1) or np.any(parts[~round_set] != 0):
            raise AssertionError("X_k^t, A_k^t and D_k^t must partition A_k")
        if len(self.trial) != self.t:
            raise AssertionError("|X_k^t| must equal t")


@dataclass
class OneByOneResult:
    witness: Optional[SpannedWitness]
    state: OneByOneState
    ledger: RevealLedger
    params: ExplorationParams

    @property
    def success(self) -> bool:
        return self.witness is not None

    def to_json(self, verbose: bool = False) -> dict:
        return {"success": self.success,
                "witness": self.witness.sorted() if self.witness else None,
                "rounds": [r.to_json(verbose) for r in self.state.rounds],
                "ledger": self.ledger.to_json(),
                "params": self.params.to_json()}


def _has_edge_into(g, vs: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Boolean per vertex in ``vs``: has a neighbour in ``g`` inside mask ``target``."""
    out = np.zeros(vs.size, dtype=bool)
    for i, v in enumerate(vs.tolist()):
        out[i] = bool(target[g.neighbors0(v)].any())
    return out


def one_by_one(g1: DoubleGraph, params: ExplorationParams, seed=None,
               check_invariants: bool = False) -> OneByOneResult:
    """Run the 1-by-1 algorithm on sprinkle ``g1``.

    ``seed`` is accepted for interface symmetry; ties are broken by the
    smallest label so the run is deterministic given ``g1``. Success
    returns the first ``t1`` trial vertices (a prefix of an internally
    spanned growth sequence, hence internally spanned itself).
    """
    n = g1.n
    if params.k_cap < 1:
        raise ValueError(f"n={n} is too small for a positive round cap")
    red, blue = g1.red, g1.blue
    ledger = RevealLedger(n)
    state = OneByOneState(n, discarded=np.zeros(n, dtype=bool))
    for k in range(1, params.k_cap + 1):
        round_set = ~state.discarded
        size = int(round_set.sum())
        if 2 * size < n:
            raise AssertionError(f"round {k} starts with |A_k|={size} < n/2")
        rt = RoundTrace(k, size)
        state.rounds.append(rt)
        state.k = k
        state.active = round_set.copy()
        state.round_discard = np.zeros(n, dtype=bool)
        first = int(np.flatnonzero(round_set)[0])
        state.trial = [first]
        state.active[first] = False
        state.t = 1
        in_trial = np.zeros(n, dtype=bool)
        in_trial[first] = True
        rt.trial.append(first + 1)
        while True:
            t = state.t
            x = state.trial[-1]
            act = np.flatnonzero(state.active)
            ledger.record(RED, act, [x])
            nb = red.neighbors0(x)
            R = nb[state.active[nb]]
            ledger.record(BLUE, R, np.asarray(state.trial))
            B = R[_has_edge_into(blue, R, in_trial)]
            rt.steps.append(StepTrace(t, int(act.size), int(R.size), int(B.size),
                                      R.size <= n / (4 * t)))
            if B.size == 0:
                break
            nxt = int(B.min())
            state.active[R] = False
            state.round_discard[R] = True
            state.round_discard[nxt] = False
            state.trial.append(nxt)
            in_trial[nxt] = True
            rt.trial.append(nxt + 1)
            state.t = t + 1
            if check_invariants:
                state.check_partition(round_set)
            if t >= params.t1:
                X = frozenset(v + 1 for v in state.trial[:params.t1])
                return OneByOneResult(SpannedWitness(X), state, ledger, params)
        state.discarded[state.trial] = True
    return OneByOneResult(None, state, ledger, params)


@dataclass
class DoublingStep:
    t: int
    x_t: int
    layer: int
    active: int
    candidates: int   # |B_t|
    chosen: int       # |C_t|, 0 when stopped

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class DoublingState:
    t: int
    trial: np.ndarray      # X_t mask
    layer: np.ndarray      # X_t \ X_{t-1}, 0-based
    steps: list[DoublingStep] = field(default_factory=list)

    @property
    def x_t(self) -> int:
        return int(self.trial.sum())


@dataclass
class DoublingResult:
    vertices: Optional[frozenset[int]]
    state: DoublingState
    ledger: RevealLedger
    target: int

    @property
    def success(self) -> bool:
        return self.vertices is not None

    def to_json(self) -> dict:
        return {"success": self.success, "target": self.target,
                "size": len(self.vertices) if self.vertices else None,
                "steps": [s.to_json() for s in self.state.steps],
                "ledger": self.ledger.to_json()}


def _hits(g, layer_mask: np.ndarray, active: np.ndarray) -> np.ndarray:
    """Mask of active vertices with a ``g``-edge into the layer."""
    e = g.edges0
    u, v = e[:, 0], e[:, 1]
    hit = np.zeros(layer_mask.size, dtype=bool)
    hit[v[layer_mask[u] & active[v]]] = True
    hit[u[layer_mask[v] & active[u]]] = True
    return hit


def doubling(g12: DoubleGraph, g2: DoubleGraph, X0, validate: bool = True) -> DoublingResult:
    """Run the doubling algorithm from the stage-1 set ``X0`` (1-indexed).

    ``g12`` (union of sprinkles 1 and 2) is only used to validate ``X0``;
    all reveals go to sprinkle ``g2``. The target size is ``ceil(n/16)``.
    """
    n = g2.n
    X0 = sorted(int(v) for v in X0)
    if not X0:
        raise ValueError("doubling needs a non-empty starting set")
    if validate and not is_internally_spanned(g12, X0):
        raise ValueError("starting set is not internally spanned")
    target = math.ceil(n / 16)
    ledger = RevealLedger(n)
    trial = np.zeros(n, dtype=bool)
    trial[np.asarray(X0) - 1] = True
    state = DoublingState(0, trial, np.asarray(X0, dtype=np.int64) - 1)
    while True:
        x_t = state.x_t
        if x_t >= target:
            return DoublingResult(frozenset((np.flatnonzero(trial) + 1).tolist()),
                                  state, ledger, target)
        active = ~trial
        act = np.flatnonzero(active)
        ledger.record(RED, act, state.layer)
        ledger.record(BLUE, act, state.layer)
        layer_mask = np.zeros(n, dtype=bool)
        layer_mask[state.layer] = True
        B = np.flatnonzero(_hits(g2.red, layer_mask, active)
                           & _hits(g2.blue, layer_mask, active))
        step = DoublingStep(state.t, x_t, int(state.layer.size), int(act.size), int(B.size), 0)
        state.steps.append(step)
        if B.size <= x_t:
            return DoublingResult(None, state, ledger, target)
        C = B[:x_t]
        step.chosen = int(C.size)
        trial[C] = True
        state.layer = C
        state.t += 1


def third_sprinkle_completion(X, g3: DoubleGraph) -> bool:
    """True iff every vertex outside ``X`` has a red and a blue ``g3`` edge into ``X``."""
    n = g3.n
    inside = np.zeros(n, dtype=bool)
    inside[np.asarray(sorted(X), dtype=np.int64) - 1] = True
    outside = ~inside
    if not outside.any():
        return True
    ok = _hits(g3.red, inside, outside) & _hits(g3.blue, inside, outside)
    return bool(ok[outside].all())


@dataclass
class PercolationCertificate:
    params: ERParams
    seed: SeedSpec
    regime: Optional[RegimeReport]
    exploration: ExplorationParams
    stage1: OneByOneResult
    stage2: Optional[DoublingResult] = None
    stage3: Optional[bool] = None
    union_percolates: Optional[bool] = None

    @property
    def success(self) -> bool:
        return bool(self.stage3)

    @property
    def failed_stage(self) -> Optional[int]:
        if not self.stage1.success:
            return 1
        if self.stage2 is None or not self.stage2.success:
            return 2
        if not self.stage3:
            return 3
        return None

    def check_ledgers(self) -> None:
        self.stage1.ledger.check()
        if self.stage2 is not None:
            self.stage2.ledger.check()

    def to_json(self, verbose: bool = False) -> dict:
        return {
            "params": self.params.to_json(),
            "seed": self.seed.to_json(),
            "sprinkle_seeds": [self.seed.child(j).to_json() for j in (1, 2, 3)],
            "regime": self.regime.to_json() if self.regime else None,
            "exploration": self.exploration.to_json(),
            "success": self.success,
            "failed_stage": self.failed_stage,
            "stage1": self.stage1.to_json(verbose),
            "stage2": self.stage2.to_json() if self.stage2 else None,
            "stage3": self.stage3,
            "union_percolates": self.union_percolates,
        }


def run_three_stage(params: ERParams, seed, check_ledgers: bool = True) -> PercolationCertificate:
    """Compose the three stages on fresh sprinkles and verify the union.

    Stage failures are recorded in the certificate, not raised. On full
    success the union of the three sprinkles is solved exactly and an
    AssertionError is raised if it does not percolate.
    """
    s = as_seed(seed)
    n = params.n
    regime = regime_check(params) if n >= 3 else None
    c = regime.c if regime else None
    ep = ExplorationParams.for_n(n, c)
    sp = gen_sprinkles(params, s)
    st1 = one_by_one(sp.first, ep)
    cert = PercolationCertificate(params, s, regime, ep, st1)
    if st1.success:
        g12 = sp.union(2)
        # stage-1 output is spanned by sprinkle 1; validate against that
        if not is_internally_spanned(sp.first, st1.witness.vertices):
            raise AssertionError("stage-1 witness is not internally spanned")
        cert.stage2 = doubling(g12, sp.second, st1.witness.vertices, validate=False)
        if cert.stage2.success:
            cert.stage3 = third_sprinkle_completion(cert.stage2.vertices, sp.third)
            if cert.stage3:
                cert.union_percolates = percolates(sp.union(3))
                if not cert.union_percolates:
                    raise AssertionError("certificate succeeded but the union does not percolate")
    if check_ledgers:
        cert.check_ledgers()
    return cert
