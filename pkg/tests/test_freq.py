import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from evidencekit.freq import (
    LocationNormalData,
    confidence_interval,
    pvalue_location_normal,
    two_sided_pvalue,
    two_stage_rejection_prob,
)
from evidencekit.kernel import rng


def test_pvalue_example_two_observations():
    # oracle: 2 * (1 - Phi(z)) = erfc(z / sqrt 2) in extended precision
    z = math.sqrt(2) * 0.53
    exact = float(mpmath.erfc(mpmath.mpf(z) / mpmath.sqrt(2)))
    p = pvalue_location_normal(LocationNormalData(2, 1.47, 1.0), 2.0)
    assert p == pytest.approx(exact, abs=1e-12)
    assert abs(p - 0.4536) <= 1e-4


def test_pvalue_at_five_standard_errors():
    p = pvalue_location_normal(LocationNormalData(25, 1.0, 1.0), 0.0)
    assert p == pytest.approx(5.733031e-7, rel=1e-6)


def test_pvalue_zero_statistic():
    assert pvalue_location_normal(LocationNormalData(7, 0.3, 2.0), 0.3) == 1.0


def test_pvalue_requires_data():
    with pytest.raises(ValueError):
        pvalue_location_normal(LocationNormalData(0, 0.0, 1.0), 0.0)


@pytest.mark.parametrize("kwargs", [dict(n=-1, xbar=0.0), dict(n=2, xbar=math.nan), dict(n=2, xbar=0.0, sigma0=0.0)])
def test_invalid_data(kwargs):
    with pytest.raises(ValueError):
        LocationNormalData(**kwargs)


def test_confidence_interval_example():
    ci = confidence_interval(LocationNormalData(4, 0.0, 1.0), 0.05)
    assert ci.lo == pytest.approx(-0.97998, abs=1e-5)
    assert ci.hi == pytest.approx(0.97998, abs=1e-5)


def test_confidence_interval_boundary_pvalue_is_alpha():
    data = LocationNormalData(9, 0.4, 1.5)
    for alpha in (0.2, 0.05, 0.001):
        ci = confidence_interval(data, alpha)
        assert pvalue_location_normal(data, ci.lo) == pytest.approx(alpha, abs=1e-9)
        assert pvalue_location_normal(data, ci.hi) == pytest.approx(alpha, abs=1e-9)


def test_interval_shrinks_as_alpha_approaches_one():
    data = LocationNormalData(4, 0.0, 1.0)
    widths = [confidence_interval(data, a).length() for a in (0.5, 0.9, 0.99, 0.9999)]
    assert widths == sorted(widths, reverse=True)
    assert widths[-1] < 1e-3


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.2])
def test_alpha_domain(alpha):
    with pytest.raises(ValueError):
        confidence_interval(LocationNormalData(4, 0.0, 1.0), alpha)


def test_duality_on_grid():
    data = LocationNormalData(5, 0.37, 1.2)
    alpha = 0.05
    ci = confidence_interval(data, alpha)
    for mu0 in np.arange(-1.5, 2.25, 1e-3):
        p = pvalue_location_normal(data, float(mu0))
        assert ci.contains(float(mu0)) == (p > alpha) or abs(p - alpha) < 1e-12


def test_pvalues_uniform_under_null():
    x = rng(11).standard_normal(100_000)
    p = two_sided_pvalue(x)
    d = stats.kstest(p, "uniform").statistic
    # asymptotic 1% critical value of the KS statistic
    assert d < 1.628 / math.sqrt(len(p))


@given(st.floats(0, 5), st.floats(0, 5), st.integers(1, 500))
def test_pvalue_monotone_in_distance(d1, d2, n):
    lo, hi = sorted((d1, d2))
    p_lo = pvalue_location_normal(LocationNormalData(n, lo, 1.0), 0.0)
    p_hi = pvalue_location_normal(LocationNormalData(n, hi, 1.0), 0.0)
    assert p_hi <= p_lo


def test_two_stage_without_second_stage_is_alpha():
    est = two_stage_rejection_prob(0.05, 50, 0, reps=200_000, seed=2)
    assert abs(est.estimate - 0.05) <= 3 * est.se


def test_two_stage_long_second_stage_exceeds_alpha():
    est = two_stage_rejection_prob(0.05, 10, 1000, reps=200_000, seed=4)
    assert est.estimate > 0.05 + 5 * est.se


def test_two_stage_input_checks():
    with pytest.raises(ValueError):
        two_stage_rejection_prob(0.05, 50, 50, reps=9_999)
    with pytest.raises(ValueError):
        two_stage_rejection_prob(0.05, 0, 50, reps=10_000)
    with pytest.raises(ValueError):
        two_stage_rejection_prob(1.0, 5, 5, reps=10_000)


def test_two_stage_worker_invariance_and_determinism():
    a = two_stage_rejection_prob(0.05, 50, 50, reps=40_000, seed=9, workers=1)
    b = two_stage_rejection_prob(0.05, 50, 50, reps=40_000, seed=9, workers=4)
    assert a == b
