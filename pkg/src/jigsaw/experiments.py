"""Monte Carlo drivers: percolation probability, threshold bisection,
the n log n scaling study, the cycle-puzzle threshold and cluster statistics.

Trial ``i`` of a batch always uses ``seed.child(i)``, and batches are
merged in trial order, so every result is a function of (config, seed)
alone, whatever the worker count.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Callable, Optional, Sequence

import numpy as np

from .cycle import cycle_trial
from .random_graphs import ERParams, SeedSpec, as_seed, gen_double
from .solver import final_labels

log = logging.getLogger(__name__)

Z95 = NormalDist().inv_cdf(0.975)
DEFAULT_REL_TOL = 0.05
MAX_DOUBLINGS = 40


class BracketError(RuntimeError):
    """Could not find probe values on both sides of the target."""


def wilson_interval(k: int, n: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("need at least one trial")
    phat = k / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return min(lo, phat), max(hi, phat)


# --- trial execution -------------------------------------------------------

def er_trial(params: ERParams, seed: SeedSpec) -> tuple[bool, int, int]:
    dg = gen_double(params, seed)
    lab, rounds = final_labels(dg)
    largest = int(np.bincount(lab).max())
    return largest == params.n, rounds, largest


def _cycle_task(n: int, p: float, seed: SeedSpec) -> tuple[bool, int, int]:
    o = cycle_trial(n, p, seed)
    return o.percolated, o.rounds, o.largest


def _run_chunk(fn, args, seed: SeedSpec, lo: int, hi: int):
    return [fn(*args, seed.child(i)) for i in range(lo, hi)]


def run_indexed(fn: Callable, args: tuple, trials: int, seed, workers: int = 1) -> list:
    """``[fn(*args, seed.child(i)) for i in range(trials)]``, optionally in parallel.

    Work is split into contiguous index blocks and concatenated in index
    order; ``fn`` must be a picklable module-level function.
    """
    seed = as_seed(seed)
    if workers <= 1 or trials < 2:
        return _run_chunk(fn, args, seed, 0, trials)
    nchunks = min(trials, workers * 4)
    bounds = np.linspace(0, trials, nchunks + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(_run_chunk, fn, args, seed, int(a), int(b))
                for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        out = []
        for f in futs:
            out.extend(f.result())
    return out


@dataclass
class TrialBatch:
    params: ERParams
    seed: SeedSpec
    percolated: np.ndarray
    rounds: np.ndarray
    largest: np.ndarray

    @property
    def trials(self) -> int:
        return int(self.percolated.size)

    @property
    def successes(self) -> int:
        return int(self.percolated.sum())


def run_trials(params: ERParams, trials: int, seed, workers: int = 1) -> TrialBatch:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    res = run_indexed(er_trial, (params,), trials, seed, workers)
    arr = np.array(res, dtype=np.int64).reshape(-1, 3)
    return TrialBatch(params, as_seed(seed), arr[:, 0].astype(bool), arr[:, 1], arr[:, 2])


@dataclass(frozen=True)
class Estimate:
    estimate: float
    ci: tuple[float, float]
    successes: int
    trials: int

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "ci_low": self.ci[0], "ci_high": self.ci[1],
                "successes": self.successes, "trials": self.trials}


def estimate_percolation_prob(params: ERParams, trials: int, seed, workers: int = 1) -> Estimate:
    batch = run_trials(params, trials, seed, workers)
    k = batch.successes
    return Estimate(k / trials, wilson_interval(k, trials), k, trials)


# --- threshold search -------------------------------------------------------

@dataclass
class Probe:
    x: float
    successes: int
    trials: int

    @property
    def estimate(self) -> float:
        return self.successes / self.trials


@dataclass
class ThresholdEstimate:
    n: int
    variable: str            # "q" (= p1 p2) or "p" (red density, cycle puzzle)
    policy: str
    lo: float
    hi: float
    hat: float
    trials_per_probe: int
    target: float = 0.5
    p1: Optional[float] = None
    probes: list[Probe] = field(default_factory=list)
    note: str = ""

    @property
    def normalized(self) -> float:
        """n q ln n for products, p ln n for the cycle puzzle."""
        ln = math.log(self.n)
        return self.n * self.hat * ln if self.variable == "q" else self.hat * ln

    @property
    def rel_width(self) -> float:
        return self.hi / self.lo - 1

    def to_json(self) -> dict:
        return {"n": self.n, "variable": self.variable, "policy": self.policy,
                "p1": self.p1, "lo": self.lo, "hi": self.hi, "hat": self.hat,
                "normalized": self.normalized, "target": self.target,
                "trials_per_probe": self.trials_per_probe, "note": self.note,
                "probes": [{"x": p.x, "successes": p.successes, "trials": p.trials}
                           for p in self.probes]}


def bisect_threshold(prob_at: Callable[[float, SeedSpec], int], x0: float, trials: int,
                     seed: SeedSpec, rel_tol: float, target: float = 0.5,
                     x_max: float = math.inf) -> tuple[float, float, float, list[Probe]]:
    """Geometric bracketing then bisection on a monotone success probability.

    ``prob_at(x, seed)`` returns the number of successes out of ``trials``.
    Each probe gets ``seed.child(probe_index)``. Returns (lo, hi, hat,
    probes) where the estimate at ``lo`` is below target, at ``hi`` at or
    above it, and ``hat`` interpolates linearly in log x between them.
    """
    probes: list[Probe] = []

    def probe(x: float) -> Probe:
        pr = Probe(x, prob_at(x, seed.child(len(probes))), trials)
        probes.append(pr)
        log.debug("probe x=%.6g -> %.4f", x, pr.estimate)
        return pr

    first = probe(min(x0, x_max))
    if first.estimate >= target:
        hi_p = first
        for _ in range(MAX_DOUBLINGS):
            lo_p = probe(hi_p.x / 2)
            if lo_p.estimate < target:
                break
            hi_p = lo_p
        else:
            raise BracketError("no probe fell below the target")
    else:
        lo_p = first
        for _ in range(MAX_DOUBLINGS):
            if lo_p.x >= x_max:
                raise BracketError("target not reached at the largest admissible value")
            hi_p = probe(min(lo_p.x * 2, x_max))
            if hi_p.estimate >= target:
                break
            lo_p = hi_p
        else:
            raise BracketError("no probe reached the target")
    while hi_p.x / lo_p.x - 1 > rel_tol:
        mid = probe(math.sqrt(lo_p.x * hi_p.x))
        if mid.estimate >= target:
            hi_p = mid
        else:
            lo_p = mid
    a, b = lo_p.estimate, hi_p.estimate
    frac = (target - a) / (b - a)
    hat = math.exp(math.log(lo_p.x) + frac * (math.log(hi_p.x) - math.log(lo_p.x)))
    return lo_p.x, hi_p.x, hat, probes


def _check_trials(trials_per_probe: int) -> str:
    if trials_per_probe < 1:
        raise ValueError("trials_per_probe must be at least 1")
    if trials_per_probe < 30:
        msg = (f"trials_per_probe={trials_per_probe}: probe estimates are very noisy "
               "(95% interval width near 1)")
        warnings.warn(msg, stacklevel=3)
        return msg
    return ""


def estimate_critical_product(n: int, ratio_policy: str = "symmetric", trials_per_probe: int = 400,
                              rel_tol: float = DEFAULT_REL_TOL, seed=0, p1: float | None = None,
                              target: float = 0.5, workers: int = 1) -> ThresholdEstimate:
    """Bisect on q = p1 p2 for the value where P(percolates) crosses ``target``.

    ``ratio_policy`` is ``"symmetric"`` (p1 = p2 = sqrt(q)) or ``"fixed"``
    (p1 given, p2 = q/p1). The search starts at q0 = 1/(n ln n).
    """
    if n < 64:
        raise ValueError("threshold estimation needs n >= 64")
    if not 0 < rel_tol < 1:
        raise ValueError("rel_tol must lie in (0, 1)")
    if ratio_policy == "symmetric":
        p1 = None
        q_max = 1.0
    elif ratio_policy == "fixed":
        if p1 is None or not 0 < p1 <= 1:
            raise ValueError("the fixed policy needs 0 < p1 <= 1")
        q_max = p1
    else:
        raise ValueError(f"unknown ratio policy {ratio_policy!r}")
    note = _check_trials(trials_per_probe)
    seed = as_seed(seed)

    def successes(q: float, s: SeedSpec) -> int:
        params = ERParams.from_product(n, q, p1)
        return int(sum(r[0] for r in run_indexed(er_trial, (params,), trials_per_probe, s, workers)))

    lo, hi, hat, probes = bisect_threshold(successes, 1 / (n * math.log(n)), trials_per_probe,
                                           seed, rel_tol, target, q_max)
    return ThresholdEstimate(n, "q", ratio_policy, lo, hi, hat, trials_per_probe, target,
                             p1, probes, note)


@dataclass(frozen=True)
class ScalingRow:
    n: int
    q_hat: float
    normalized: float
    lo: float
    hi: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def scaling_study(ns: Sequence[int], trials_per_probe: int = 400, rel_tol: float = DEFAULT_REL_TOL,
                  seed=0, workers: int = 1, ratio_policy: str = "symmetric",
                  p1: float | None = None) -> list[ScalingRow]:
    seed = as_seed(seed)
    rows = []
    for n in ns:
        est = estimate_critical_product(n, ratio_policy, trials_per_probe, rel_tol,
                                        seed.child(n), p1=p1, workers=workers)
        rows.append(ScalingRow(n, est.hat, est.normalized, est.lo, est.hi))
        log.info("n=%d q_hat=%.4g n q ln n=%.4f", n, est.hat, est.normalized)
    return rows


def scaling_spread(rows: Sequence[ScalingRow]) -> float:
    """max/min of the normalised column (1 for a single row)."""
    vals = [r.normalized for r in rows]
    return max(vals) / min(vals)


def cycle_puzzle_threshold(n: int, trials_per_probe: int = 200, seed=0,
                           rel_tol: float = DEFAULT_REL_TOL, target: float = 0.5,
                           workers: int = 1) -> ThresholdEstimate:
    """Bisect on the red density p with the n-cycle as the blue graph."""
    note = _check_trials(trials_per_probe)
    seed = as_seed(seed)

    def successes(p: float, s: SeedSpec) -> int:
        return int(sum(r[0] for r in run_indexed(_cycle_task, (n, p), trials_per_probe, s, workers)))

    lo, hi, hat, probes = bisect_threshold(successes, 1 / math.log(n), trials_per_probe,
                                           seed, rel_tol, target, 1.0)
    return ThresholdEstimate(n, "p", "cycle", lo, hi, hat, trials_per_probe, target,
                             None, probes, note)


# --- cluster statistics -----------------------------------------------------

@dataclass
class ClusterStats:
    params: ERParams
    trials: int
    largest: Counter
    rounds: Counter

    @staticmethod
    def _quantiles(c: Counter) -> dict:
        vals = np.repeat(np.array(sorted(c)), [c[k] for k in sorted(c)])
        qs = (0.1, 0.25, 0.5, 0.75, 0.9)
        return {f"q{int(q * 100):02d}": float(np.quantile(vals, q)) for q in qs}

    def summary(self) -> dict:
        return {"largest": self._quantiles(self.largest), "rounds": self._quantiles(self.rounds)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["quantity", "value", "count"])
        for name, c in (("largest", self.largest), ("rounds", self.rounds)):
            for k in sorted(c):
                w.writerow([name, k, c[k]])
        return buf.getvalue()


def cluster_stats(params: ERParams, trials: int, seed, workers: int = 1) -> ClusterStats:
    batch = run_trials(params, trials, seed, workers)
    return ClusterStats(params, trials, Counter(batch.largest.tolist()),
                        Counter(batch.rounds.tolist()))
