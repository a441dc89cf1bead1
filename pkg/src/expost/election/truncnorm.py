"""Mean and variance of a normal distribution truncated to an interval.

Evaluated in standard units with the ratio of density to mass. Three regimes
keep the ratio accurate:

* deep left tail (after reflecting so the interval leans left): scaled
  complementary error function, which avoids underflow of both density and mass;
* moderate intervals: difference of error functions;
* very narrow intervals: the density is nearly exponential across the interval,
  so the moments follow from the Langevin function.
"""
from __future__ import annotations

import numpy as np
from scipy.special import erf, erfcx

_SQRT2 = np.sqrt(2.0)
_SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)
NARROW_WIDTH = 1e-3
_SERIES_X = 1e-2


def _langevin(x: np.ndarray) -> np.ndarray:
    """coth(x) - 1/x, odd, with a series near zero."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < _SERIES_X
    xs = x[small]
    out[small] = xs / 3.0 - xs**3 / 45.0 + 2.0 * xs**5 / 945.0
    xl = x[~small]
    out[~small] = 1.0 / np.tanh(xl) - 1.0 / xl
    return out


def _langevin_var(x: np.ndarray) -> np.ndarray:
    """1/x^2 - 1/sinh(x)^2, the variance of Uniform-tilted [-1, 1] noise."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < _SERIES_X
    xs2 = x[small] ** 2
    out[small] = 1.0 / 3.0 - xs2 / 15.0 + 2.0 * xs2**2 / 189.0
    xl = np.abs(x[~small])
    with np.errstate(over="ignore"):
        csch = np.where(xl > 700.0, 0.0, 1.0 / np.sinh(np.minimum(xl, 700.0)))
    out[~small] = 1.0 / xl**2 - csch**2
    return out


def _xphi(x: np.ndarray) -> np.ndarray:
    """x * phi(x) with the limit 0 at infinity."""
    with np.errstate(invalid="ignore"):
        out = x * np.exp(-0.5 * x * x) * _INV_SQRT_2PI
    return np.where(np.isinf(x), 0.0, out)


def _standard_moments(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and variance of N(0, 1) truncated to [a, b], a < b, elementwise."""
    mean = np.empty_like(a)
    var = np.empty_like(a)

    # reflect so that the interval leans into the left tail
    with np.errstate(invalid="ignore"):
        flip = (a + b) > 0
    lo = np.where(flip, -b, a)
    hi = np.where(flip, -a, b)

    narrow = (hi - lo) < NARROW_WIDTH
    tail = ~narrow & (hi < -1.0)
    body = ~narrow & ~tail

    if np.any(narrow):
        c = 0.5 * (lo[narrow] + hi[narrow])
        h = 0.5 * (hi[narrow] - lo[narrow])
        x = -c * h
        mean[narrow] = c + h * _langevin(x)
        var[narrow] = h * h * _langevin_var(x)

    if np.any(tail):
        lt, ht = lo[tail], hi[tail]
        d = np.where(np.isinf(lt), -np.inf, 0.5 * (ht * ht - lt * lt))
        ed = np.exp(d)
        denom = erfcx(-ht / _SQRT2) - ed * np.where(np.isinf(lt), 0.0, erfcx(-lt / _SQRT2))
        m = _SQRT_2_OVER_PI * np.expm1(d) / denom
        lt_ed = np.where(np.isinf(lt), 0.0, lt * ed)
        t = _SQRT_2_OVER_PI * (lt_ed - ht) / denom
        mean[tail] = m
        var[tail] = 1.0 + t - m * m

    if np.any(body):
        lb, hb = lo[body], hi[body]
        z = 0.5 * (erf(hb / _SQRT2) - erf(lb / _SQRT2))
        phi_l = np.exp(-0.5 * lb * lb) * _INV_SQRT_2PI
        phi_h = np.exp(-0.5 * hb * hb) * _INV_SQRT_2PI
        m = (phi_l - phi_h) / z
        mean[body] = m
        var[body] = 1.0 + (_xphi(lb) - _xphi(hb)) / z - m * m

    mean = np.where(flip, -mean, mean)
    return mean, np.maximum(var, 0.0)


def _prepare(mu, sigma, lo, hi):
    mu, sigma, lo, hi = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (mu, sigma, lo, hi)))
    if np.any(~(sigma > 0)):
        raise ValueError("sigma must be positive")
    if np.any(lo > hi):
        raise ValueError("interval must satisfy lo <= hi")
    return mu, sigma, lo, hi


def truncated_normal_moments(mu, sigma, lo, hi) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise mean and variance; a point interval gives (lo, 0)."""
    mu, sigma, lo, hi = _prepare(mu, sigma, lo, hi)
    point = lo == hi
    mean = np.array(lo, dtype=float, copy=True)
    var = np.zeros_like(mean)
    if np.any(~point):
        m = ~point
        a = (lo[m] - mu[m]) / sigma[m]
        b = (hi[m] - mu[m]) / sigma[m]
        sm, sv = _standard_moments(a, b)
        mean[m] = mu[m] + sigma[m] * sm
        var[m] = sigma[m] ** 2 * sv
    return mean, var


def _scalar_or_array(arr: np.ndarray, *inputs):
    if all(np.ndim(v) == 0 for v in inputs):
        return float(arr)
    return arr


def truncated_normal_mean(mu, sigma, lo, hi):
    """Mean of N(mu, sigma^2) restricted to [lo, hi]."""
    mean, _ = truncated_normal_moments(mu, sigma, lo, hi)
    return _scalar_or_array(mean, mu, sigma, lo, hi)


def truncated_normal_variance(mu, sigma, lo, hi):
    """Variance of N(mu, sigma^2) restricted to [lo, hi]."""
    _, var = truncated_normal_moments(mu, sigma, lo, hi)
    return _scalar_or_array(var, mu, sigma, lo, hi)
