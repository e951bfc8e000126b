import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jigsaw.bounds import (DOUBLING_KAPPA, bounds_table_row, completion_failure_bound,
                           doubling_success_bound, log_binom, logsumexp, part_i_upper_bound,
                           qti_bounds, rkt_lower_bound, trial_bounds)

mpmath.mp.dps = 50


def oracle_exact_sum(n, p1, p2):
    lo, hi = math.ceil(math.log(n)), math.floor(2 * math.log(n))
    p1, p2 = mpmath.mpf(p1), mpmath.mpf(p2)
    return mpmath.fsum(mpmath.binomial(n, k) * mpmath.mpf(k) ** (2 * (k - 2))
                       * (p1 * p2) ** (k - 1) for k in range(lo, hi + 1))


GRID = [(n, p1, p2)
        for n in (10, 100, 4096, 10 ** 6, 10 ** 9)
        for p1, p2 in ((1e-6, 1e-6), (1e-3, 2e-4), (0.01, 0.01), (0.3, 1e-5), (0.5, 0.5))]


@pytest.mark.parametrize("n, p1, p2", GRID)
def test_exact_sum_against_mpmath(n, p1, p2):
    exact, chain = part_i_upper_bound(n, p1, p2)
    ref = mpmath.log(oracle_exact_sum(n, p1, p2))
    assert abs(exact.log_value - float(ref)) <= 1e-9 * max(1.0, abs(float(ref)))
    logs = [b.log_value for b in chain]
    assert all(a <= b + 1e-9 * max(1, abs(a)) for a, b in zip(logs, logs[1:]))


def test_subcritical_point_ratio():
    n = 4096
    q = 1 / (math.e ** 4 * n * math.log(n))
    p = math.sqrt(q)
    exact, chain = part_i_upper_bound(n, p, p)
    ratio = chain[-1].detail["ratio"]
    assert ratio == pytest.approx(2 / math.e ** 3)
    assert ratio <= math.e ** -2
    assert exact.value <= chain[-1].value


def test_zero_probabilities():
    exact, chain = part_i_upper_bound(100, 0.0, 0.0)
    assert exact.value == 0.0 and chain[-1].value == 0.0


def test_divergent_flag():
    _, chain = part_i_upper_bound(1000, 0.5, 0.5)
    assert chain[-1].flags["divergent"] and chain[-1].value == 1.0


def test_no_overflow():
    exact, chain = part_i_upper_bound(10 ** 9, 0.9, 0.9)
    assert all(0.0 <= b.value <= 1.0 for b in chain)
    assert math.isfinite(exact.log_value)


def test_log_helpers():
    assert log_binom(10, 3) == pytest.approx(math.log(120))
    assert log_binom(5, 7) == -math.inf
    assert log_binom(10 ** 9, 3) == pytest.approx(
        float(mpmath.log(mpmath.binomial(10 ** 9, 3))), rel=1e-15)
    assert log_binom(2000, 1000) == pytest.approx(
        float(mpmath.log(mpmath.binomial(2000, 1000))), rel=1e-13)
    assert logsumexp([math.log(2), math.log(3)]) == pytest.approx(math.log(5))
    assert logsumexp([]) == -math.inf


class TestRkt:
    def test_degenerate(self):
        b = rkt_lower_bound(1000, 0.1, 0.5, 2)
        assert b.degenerate and b.best.value == 0.0

    def test_boundary_substitution(self):
        n, p2, t = 1000, 0.01, 5
        p1 = 1 / (n * p2 * t)
        b = rkt_lower_bound(n, p1, p2, t)
        assert b.small_applies
        assert b.small.value == pytest.approx((1 - p2 * t) / 10)

    def test_range_flag(self):
        assert not rkt_lower_bound(100, 0.01, 0.01, 10 ** 4).hypothesis_ok

    @given(st.integers(10, 10 ** 6), st.floats(1e-8, 1), st.floats(1e-8, 1), st.integers(1, 50))
    def test_small_branch_below_first(self, n, p1, p2, t):
        b = rkt_lower_bound(n, p1, p2, t)
        if b.small_applies and not b.degenerate:
            assert b.small.log_value <= b.unconditional.log_value + 1e-12


def test_trial_bounds_oracle():
    n, c = 4096, 64
    a, b = trial_bounds(n, c)
    ln = mpmath.log(n)
    assert a.value == pytest.approx(float(mpmath.power(n, -4 / mpmath.mpf(c))), rel=1e-12)
    ref = mpmath.exp(-3 * mpmath.exp(-mpmath.mpf(1) / 6) / (1 - mpmath.exp(-c / (6 * ln))))
    assert b.value == pytest.approx(float(ref), rel=1e-12)
    assert trial_bounds(n, 4)[0].value == pytest.approx(1 / n)


def test_trial_bounds_large_c():
    # stage a tends to 1; the displayed stage-b form keeps the constant
    # e^(-1/6) from t0 = ln n / c and tends to exp(-3 e^(-1/6))
    a, b = trial_bounds(4096, 1e9)
    assert a.value == pytest.approx(1.0)
    assert b.value == pytest.approx(math.exp(-3 * math.exp(-1 / 6)), rel=1e-6)
    a, b = trial_bounds(4096, 0.5)
    assert 0 <= a.value < 1e-10 and 0 <= b.value < 1
    with pytest.raises(ValueError):
        trial_bounds(4096, 0.0)


class TestQti:
    def test_zero(self):
        exact, lower = qti_bounds(0.0, 10)
        assert exact.value == 0.0 and lower.value == 0.0

    def test_boundary(self):
        exact, lower = qti_bounds(0.2, 10)
        assert lower.value == 0.5
        assert exact.value == pytest.approx(1 - (1 - 0.2) ** 5)

    @given(st.floats(0, 1), st.integers(1, 10 ** 6))
    def test_exact_above_lower(self, p, x):
        exact, lower = qti_bounds(p, x)
        assert exact.value >= lower.value - 1e-12


def test_doubling_bound():
    assert doubling_success_bound(4096, 64).value == 1.0
    tiny = doubling_success_bound(4096, 1e-12)
    assert tiny.value < 1e-9 and tiny.flags["artifact_constant"]
    assert tiny.detail["kappa"] == DOUBLING_KAPPA


def test_completion_bound():
    assert completion_failure_bound(4096, 0.05).value == pytest.approx(2 * 4096 * 0.95 ** 256)
    assert completion_failure_bound(4096, 0.2).value < 1e-20
    assert completion_failure_bound(100, 0.0).value == 1.0


def test_table_row_in_unit_interval():
    row = bounds_table_row(4096, 0.01, 0.02)
    for key in ("part_i_exact", "trial_a", "trial_b", "doubling", "completion_failure", "rkt_t1"):
        assert 0.0 <= row[key] <= 1.0
