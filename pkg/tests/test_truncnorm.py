import math

import numpy as np
import pytest

from expost.election.truncnorm import (
    truncated_normal_mean,
    truncated_normal_moments,
    truncated_normal_variance,
)

from oracles import truncnorm_grid, truncnorm_mean_quad


def test_symmetric_interval_mean_is_centre():
    assert truncated_normal_mean(1.5, 2.0, 0.5, 2.5) == pytest.approx(1.5, abs=1e-15)


def test_benevolent_example_value():
    value = truncated_normal_mean(0.5, math.sqrt(1.5), -1.0, 1.0)
    assert abs(value - truncnorm_mean_quad(0.5, math.sqrt(1.5), -1.0, 1.0)) <= 1e-8
    assert value == pytest.approx(0.1009, abs=1e-4)


def test_scalar_and_array():
    assert isinstance(truncated_normal_mean(0.0, 1.0, -1.0, 2.0), float)
    out = truncated_normal_mean(np.zeros(3), 1.0, [-1.0, 0.0, 1.0], 2.0)
    assert out.shape == (3,)


def test_point_interval():
    mean, var = truncated_normal_moments(0.3, 1.0, 2.0, 2.0)
    assert mean == 2.0 and var == 0.0


def test_half_line_matches_mills_ratio():
    # E[Z | Z > 0] = sqrt(2/pi)
    assert truncated_normal_mean(0.0, 1.0, 0.0, np.inf) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-14)
    assert truncated_normal_variance(0.0, 1.0, 0.0, np.inf) == pytest.approx(1 - 2 / math.pi, rel=1e-13)


def test_deep_tails_stay_inside_interval():
    for lo in (8.0, 30.0, 200.0):
        m = truncated_normal_mean(0.0, 1.0, lo, lo + 1.0)
        assert lo < m < lo + 1.0
        assert m == pytest.approx(lo + 1 / lo, rel=0.02)
        assert truncated_normal_mean(0.0, 1.0, -lo - 1.0, -lo) == pytest.approx(-m, abs=1e-12)


def test_narrow_interval_near_midpoint():
    lo = 0.7
    for width in (1e-4, 1e-8, 1e-12):
        m = truncated_normal_mean(0.0, 1.0, lo, lo + width)
        assert abs(m - (lo + width / 2)) <= width * 1e-3 + 1e-15


def test_variance_matches_quadrature():
    import mpmath as mp
    for mu, sigma, lo, hi in [(0.0, 1.0, -1.0, 2.0), (1.0, 0.5, 2.0, 4.0), (0.0, 2.0, -9.0, -3.0)]:
        f = lambda x: mp.npdf(x, mu, sigma)
        z = mp.quad(f, [lo, hi])
        m1 = mp.quad(lambda x: x * f(x), [lo, hi]) / z
        m2 = mp.quad(lambda x: x * x * f(x), [lo, hi]) / z
        assert truncated_normal_variance(mu, sigma, lo, hi) == pytest.approx(float(m2 - m1**2), abs=1e-12)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        truncated_normal_mean(0.0, -1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        truncated_normal_mean(0.0, 1.0, 1.0, 0.0)


def test_grid_against_quadrature():
    grid = truncnorm_grid(np.random.default_rng(31), n=60)
    for mu, sigma, lo, hi in grid:
        assert abs(truncated_normal_mean(mu, sigma, lo, hi) - truncnorm_mean_quad(mu, sigma, lo, hi)) <= 1e-8
