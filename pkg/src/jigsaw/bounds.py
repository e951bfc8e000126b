"""Log-space evaluators for the closed-form probability bounds.

All arithmetic is in natural logs: binomials via ``lgamma`` and sums via
log-sum-exp, so nothing overflows for n up to 1e9. A :class:`BoundValue`
carries the log value, the value clamped to [0, 1] and a dict of flags
recording which hypotheses held.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

NEG_INF = float("-inf")

# The doubling bound is 1 - exp(-Omega(c (ln n)^2)); the Omega constant is not
# given, this value is our choice.
DOUBLING_KAPPA = 1 / 8


@dataclass(frozen=True)
class BoundValue:
    log_value: float
    flags: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)

    @property
    def value(self) -> float:
        if self.log_value >= 0:
            return 1.0
        return math.exp(self.log_value)

    @property
    def raw(self) -> float:
        """Unclamped value (may be inf)."""
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    def to_json(self) -> dict:
        return {"log_value": self.log_value, "value": self.value,
                "flags": dict(self.flags), **({"detail": dict(self.detail)} if self.detail else {})}


def _log(x: float) -> float:
    return math.log(x) if x > 0 else NEG_INF


def log1mexp(a: float) -> float:
    """log(1 - exp(a)) for a <= 0."""
    if a == 0:
        return NEG_INF
    if a > -math.log(2):
        return math.log(-math.expm1(a))
    return math.log1p(-math.exp(a))


def logsumexp(xs) -> float:
    xs = [x for x in xs if x != NEG_INF]
    if not xs:
        return NEG_INF
    m = max(xs)
    if m == math.inf:
        return math.inf
    return m + math.log(sum(math.exp(x - m) for x in xs))


def log_binom(n: int, k: int) -> float:
    if k < 0 or k > n:
        return NEG_INF
    k = min(k, n - k)
    if k <= 256:
        # lgamma(n+1) - lgamma(n-k+1) cancels badly for huge n; sum directly
        return (k * math.log(n) + math.fsum(math.log1p(-i / n) for i in range(k))
                - math.lgamma(k + 1))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _from_prob(p: float, **flags) -> BoundValue:
    return BoundValue(_log(p), flags)


def part_i_limits(n: int) -> tuple[int, int]:
    ln = math.log(n)
    return math.ceil(ln), math.floor(2 * ln)


def part_i_upper_bound(n: int, p1: float, p2: float) -> tuple[BoundValue, list[BoundValue]]:
    """Tree-counting bound on P(percolation) and its successive relaxations.

    ``exact_sum`` is sum_k C(n,k) k^(k-2) p1^(k-1) k^(k-2) p2^(k-1) for k in
    [ceil(ln n), floor(2 ln n)]. The chain holds, in order:

    0. ``exact_sum``
    1. (1/(p1 p2)) sum_k (e n k p1 p2)^k
    2. (1/(p1 p2)) sum_k (2 e n p1 p2 ln n)^k
    3. 2 e n ln n sum_{k >= ceil(ln n)} r^(k-1), r = 2 e n p1 p2 ln n,
       flagged ``divergent`` (log value +inf) when r >= 1.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    k_lo, k_hi = part_i_limits(n)
    ln = math.log(n)
    lq = _log(p1) + _log(p2)
    ks = range(k_lo, k_hi + 1)

    def times(k: int, lx: float) -> float:
        # k * lx with the convention 0 * (-inf) = 0
        return 0.0 if k == 0 else k * lx

    exact = logsumexp(log_binom(n, k) + 2 * (k - 2) * math.log(k) + times(k - 1, lq)
                      for k in ks)
    # (1/q) * (e n k q)^k = (e n k)^k * q^(k-1)
    step1 = logsumexp(k * (1 + math.log(n) + math.log(k)) + times(k - 1, lq) for k in ks)
    lr = math.log(2 * math.e * n * ln) + lq  # log ratio
    step2 = logsumexp(k * math.log(2 * math.e * n * ln) + times(k - 1, lq) for k in ks)
    if lr >= 0:
        step3 = BoundValue(math.inf, {"divergent": True}, {"ratio": math.exp(lr)})
    else:
        l3 = math.log(2 * math.e * n * ln) + times(k_lo - 1, lr) - log1mexp(lr)
        step3 = BoundValue(l3, {"divergent": False}, {"ratio": math.exp(lr)})
    exact_bv = BoundValue(exact, {"k_range": (k_lo, k_hi)})
    chain = [exact_bv, BoundValue(step1), BoundValue(step2), step3]
    return exact_bv, chain


@dataclass(frozen=True)
class RktBound:
    unconditional: BoundValue
    small: BoundValue
    small_applies: bool      # n p1 p2 t <= 1
    degenerate: bool         # 1 - p2 t <= 0
    hypothesis_ok: bool      # t and k within the bound's stated range

    @property
    def best(self) -> BoundValue:
        if self.small_applies and self.small.log_value > self.unconditional.log_value:
            return self.small
        return self.unconditional


def rkt_lower_bound(n: int, p1: float, p2: float, t: int, k: int | None = None) -> RktBound:
    """Lower bounds on the per-step continuation probability r_k^t.

    Unconditional: 1 - exp(-(n/5) p1 p2 t (1 - p2 t)).
    Small regime (n p1 p2 t <= 1): (1/10) n p1 p2 t (1 - p2 t).
    Both are clamped at 0 when 1 - p2 t <= 0.
    """
    ln = math.log(n)
    in_range = 1 <= t <= math.ceil(ln ** 1.5)
    k_ok = k is None or k <= n / (2 * ln ** 1.5)
    flags = {"t_in_range": in_range, "k_in_range": k_ok}
    slack = 1 - p2 * t
    x = n * p1 * p2 * t
    applies = x <= 1
    if slack <= 0:
        zero = BoundValue(NEG_INF, {**flags, "degenerate": True})
        return RktBound(zero, zero, applies, True, in_range and k_ok)
    y = x * slack
    unc = BoundValue(log1mexp(-y / 5) if y > 0 else NEG_INF, {**flags, "degenerate": False})
    small = BoundValue(_log(y / 10), {**flags, "degenerate": False, "applies": applies})
    return RktBound(unc, small, applies, False, in_range and k_ok)


def trial_bounds(n: int, c: float) -> tuple[BoundValue, BoundValue]:
    """Round-survival bounds: to step t0 (n^(-4/c)) and from t0 to t1.

    The second is exp(-3 e^(-1/6) / (1 - e^(-c/(6 ln n)))), the explicit
    form before the constant is absorbed into n^(-O(1)/c).
    """
    if n < 3 or c <= 0:
        raise ValueError("need n >= 3 and c > 0")
    ln = math.log(n)
    a = BoundValue(-4 / c * ln)
    denom = -math.expm1(-c / (6 * ln))
    b = BoundValue(-3 * math.exp(-1 / 6) / denom)
    return a, b


def qti_bounds(p: float, x_t: int) -> tuple[BoundValue, BoundValue]:
    """Probability that a vertex hits a layer of x_t/2 vertices, and its floor."""
    if x_t < 1:
        raise ValueError("x_t must be at least 1")
    if p == 0:
        exact = BoundValue(NEG_INF)
    elif p == 1:
        exact = BoundValue(0.0)
    else:
        exact = BoundValue(log1mexp(x_t / 2 * math.log1p(-p)))
    px = p * x_t
    lower = BoundValue(_log(px / 4) if px < 2 else math.log(0.5), {"case": "small" if px < 2 else "large"})
    return exact, lower


def doubling_success_bound(n: int, c: float, kappa: float = DOUBLING_KAPPA) -> BoundValue:
    """1 - exp(-kappa c (ln n)^2), with kappa our own choice (flagged)."""
    if n < 3:
        raise ValueError("need n >= 3")
    a = -kappa * c * math.log(n) ** 2
    lv = log1mexp(a) if a < 0 else NEG_INF
    return BoundValue(lv, {"artifact_constant": True}, {"kappa": kappa})


def completion_failure_bound(n: int, p1: float) -> BoundValue:
    """Union bound 2 n (1 - p1)^(n/16) on some vertex missing the stage-2 set."""
    lv = math.log(2 * n) + (n / 16) * (math.log1p(-p1) if p1 < 1 else NEG_INF)
    return BoundValue(lv)


def bounds_table_row(n: int, p1: float, p2: float) -> dict:
    """All evaluators at one (n, p1, p2) point, flattened for CSV output."""
    exact, chain = part_i_upper_bound(n, p1, p2)
    c = p1 * p2 * n * math.log(n)
    row = {"n": n, "p1": p1, "p2": p2, "c": c,
           "part_i_exact": exact.value, "part_i_log": exact.log_value,
           "part_i_geometric_log": chain[-1].log_value,
           "part_i_divergent": chain[-1].flags["divergent"]}
    if c > 0:
        a, b = trial_bounds(n, c)
        row.update(trial_a=a.value, trial_b=b.value,
                   doubling=doubling_success_bound(n, c).value)
    else:
        row.update(trial_a=0.0, trial_b=0.0, doubling=0.0)
    row["completion_failure"] = completion_failure_bound(n, min(p1, p2)).value
    r1 = rkt_lower_bound(n, p1, p2, 1)
    row["rkt_t1"] = r1.best.value
    return row
