import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from vrshuffle.errors import ParameterError
from vrshuffle.numerics import (binom_logpmf, binom_pmf, binom_cdf_range,
                                BinomialRange, stable_sum, planar_laplace_tv)


def exact_pmf(c, s, k):
    return math.comb(c, k)*s**k*(1 - s)**(c - k)


@pytest.mark.parametrize('c, s', [(10, Fraction(3, 10)), (25, Fraction(1, 7)),
                                  (40, Fraction(1, 2))])
def test_binom_pmf_matches_exact_rationals(c, s):
    for k in range(c + 1):
        expected = float(exact_pmf(c, s, k))
        assert binom_pmf(c, float(s), k) == pytest.approx(expected, rel=1e-12)


def test_binom_logpmf_outside_support():
    assert binom_logpmf(10, 0.3, -1) == -np.inf
    assert binom_logpmf(10, 0.3, 11) == -np.inf
    assert binom_pmf(10, 0.3, 11) == 0.0


def test_binom_pmf_degenerate_success_probability():
    assert binom_pmf(5, 0.0, 0) == pytest.approx(1.0)
    assert binom_pmf(5, 1.0, 5) == pytest.approx(1.0)
    assert binom_pmf(5, 0.0, 1) == 0.0


def test_binom_pmf_array_input():
    out = binom_pmf(12, 0.25, np.arange(13))
    assert out.shape == (13,)
    assert out.sum() == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize('lo, hi', [(0, 30), (3, 9), (10, 10), (12, 30), (0, 0), (25, 28)])
def test_binom_cdf_range_matches_exact_sum(lo, hi):
    c, s = 30, Fraction(1, 5)
    expected = float(sum(exact_pmf(c, s, k) for k in range(lo, hi + 1)))
    assert binom_cdf_range(c, float(s), lo, hi) == pytest.approx(expected, rel=1e-10, abs=1e-300)


def test_binom_cdf_range_clamps_and_empty_ranges():
    assert binom_cdf_range(20, 0.4, -5, 50) == pytest.approx(1.0)
    assert binom_cdf_range(20, 0.4, 8, 3) == 0.0
    assert binom_cdf_range(20, 0.4, 21, 40) == 0.0
    assert binom_cdf_range(20, 0.4, -10, -1) == 0.0
    assert binom_cdf_range(0, 0.4, 0, 0) == pytest.approx(1.0)


def test_binom_cdf_range_upper_tail_keeps_relative_precision():
    c, s, lo = 1000, 0.01, 100
    expected = stats.binom.sf(lo - 1, c, s)
    assert expected < 1e-50
    assert binom_cdf_range(c, s, lo, c) == pytest.approx(expected, rel=1e-8)


def test_binom_cdf_range_broadcasts():
    c = np.array([10, 20, 30])
    out = binom_cdf_range(c, 0.5, 0, c//2)
    assert out.shape == (3,)
    for ci, val in zip(c, out):
        assert val == pytest.approx(stats.binom.cdf(ci//2, ci, 0.5), rel=1e-12)


@pytest.mark.parametrize('s', [-0.1, 1.5, float('nan')])
def test_binomial_rejects_bad_success_probability(s):
    with pytest.raises(ParameterError):
        binom_cdf_range(10, s, 0, 3)


def test_binomial_rejects_negative_trials():
    with pytest.raises(ParameterError):
        binom_logpmf(-1, 0.5, 0)


def test_binomial_range_event():
    event = BinomialRange(trials=10, success_prob=0.3, lo=-2, hi=4)
    assert event.clamped() == (0, 4)
    assert event.probability() == pytest.approx(stats.binom.cdf(4, 10, 0.3), rel=1e-12)
    assert BinomialRange(10, 0.3, 7, 2).clamped() is None


def test_stable_sum_cancellation():
    assert stable_sum([1e16, 1.0, -1e16]) == 1.0
    assert stable_sum(np.array([1e100, 1.0, -1e100, 1e-100])) == 1.0


def test_stable_sum_matches_sorted_fsum():
    rng = np.random.default_rng(7)
    terms = rng.normal(size=5000)*10.0**rng.integers(-8, 8, size=5000)
    assert stable_sum(terms) == math.fsum(sorted(terms.tolist()))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(min_value=-1e12, max_value=1e12), min_size=1, max_size=60),
       st.integers(min_value=1, max_value=10))
def test_stable_sum_independent_of_chunking(terms, nchunks):
    arr = np.array(terms)
    chunks = np.array_split(arr, nchunks)
    assert stable_sum(chunks) == stable_sum(arr)


def test_planar_laplace_tv_edges():
    assert planar_laplace_tv(0.0) == 0.0
    with pytest.raises(ParameterError):
        planar_laplace_tv(-1.0)
    assert planar_laplace_tv(60.0) == pytest.approx(1.0, abs=1e-10)


def test_planar_laplace_tv_increasing():
    vals = [planar_laplace_tv(d) for d in (0.1, 0.5, 1.0, 2.0, 4.0)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_planar_laplace_tv_below_linear_laplace():
    # 1-D Laplace TV is 1 - exp(-d/2); the planar density spreads mass sideways
    for d in (0.5, 1.0, 3.0):
        assert planar_laplace_tv(d) < -math.expm1(-d/2)


@pytest.mark.parametrize('d01', [0.5, 1.0, 2.5])
def test_planar_laplace_tv_monte_carlo(d01):
    rng = np.random.default_rng(11)
    npts = 400_000
    radius = rng.gamma(2.0, 1.0, size=npts)
    theta = rng.uniform(0, 2*np.pi, size=npts)
    x = radius*np.cos(theta)
    estimate = np.mean(np.abs(x) < d01/2)
    assert planar_laplace_tv(d01) == pytest.approx(estimate, abs=4e-3)
