#!/usr/bin/env python
"""
Numerically stable primitives used by the divergence engines:

  binomial mass in the log domain, binomial range probabilities through
  the regularized incomplete beta function, compensated summation and
  the total variation between two planar Laplace distributions.

All functions are pure and accept numpy arrays where noted, so that the
divergence engine can evaluate a whole block of binomial trials at once.
"""
import math
import logging
from itertools import chain
from dataclasses import dataclass

import numpy as np
from scipy import special, integrate

from .errors import ParameterError

logger = logging.getLogger(__name__)

LOG_ZERO = -np.inf


def _check_binomial(c, s):
    c = np.asarray(c)
    s = np.asarray(s, dtype='float64')
    if np.any(c < 0):
        raise ParameterError(f"binomial trial count must be >= 0, got {c.min()}")
    if np.any(np.isnan(s)) or np.any(s < 0) or np.any(s > 1):
        raise ParameterError("binomial success probability must be in [0, 1]")
    return c.astype('int64'), s


def _as_result(out):
    out = np.asarray(out, dtype='float64')
    if out.ndim == 0:
        return float(out)
    return out


def binom_logpmf(c, s, k):
    """log of the binomial mass C(c,k) s^k (1-s)^(c-k)

    Arguments
    ---------
    c   number of trials (int or int array)
    s   success probability in [0, 1]
    k   number of successes (int or int array)

    Returns
    -------
    log probability, -inf outside 0 <= k <= c
    """
    c, s = _check_binomial(c, s)
    k = np.asarray(k, dtype='int64')
    inside = (k >= 0) & (k <= c)
    kk = np.clip(k, 0, c)
    with np.errstate(divide='ignore', invalid='ignore'):
        out = (-np.log1p(c) - special.betaln(c - kk + 1, kk + 1)
               + special.xlogy(kk, s) + special.xlog1py(c - kk, -s))
    out = np.where(inside, out, LOG_ZERO)
    return _as_result(out)


def binom_pmf(c, s, k):
    """binomial mass, computed in the log domain with a single exp()"""
    out = np.exp(binom_logpmf(c, s, k))
    return _as_result(out)


def _cdf(c, s, k):
    "P[X <= k] for X ~ Binomial(c, s), elementwise"
    ks = np.clip(k, 0, np.maximum(c - 1, 0))
    val = special.betainc(np.maximum(c - ks, 1), ks + 1, 1.0 - s)
    return np.where(k < 0, 0.0, np.where(k >= c, 1.0, val))


def _sf(c, s, k):
    "P[X >= k] for X ~ Binomial(c, s), elementwise"
    ks = np.clip(k, 1, np.maximum(c, 1))
    val = special.betainc(ks, np.maximum(c - ks + 1, 1), s)
    return np.where(k <= 0, 1.0, np.where(k > c, 0.0, val))


def binom_cdf_range(c, s, lo, hi):
    """probability that a Binomial(c, s) variable lies in [lo, hi]

    Arguments
    ---------
    c       number of trials (int or int array), c >= 0
    s       success probability in [0, 1] (scalar or array)
    lo, hi  range bounds (int or int arrays), clamped to [0, c]

    Returns
    -------
    probability as float (or array), 0 for an empty clamped range.

    Notes
    -----
    Both ends are evaluated with the regularized incomplete beta function,
    P[X <= k] = I_{1-s}(c-k, k+1).  Ranges that start above the mean are
    taken from the upper tail, P[X >= k] = I_s(k, c-k+1), so that small
    tail probabilities keep their relative precision.
    """
    c, s = _check_binomial(c, s)
    c, s, lo, hi = np.broadcast_arrays(c, s, np.asarray(lo, dtype='int64'),
                                       np.asarray(hi, dtype='int64'))
    shape = c.shape
    c, s, lo, hi = (np.atleast_1d(x).ravel() for x in (c, s, lo, hi))
    lo = np.maximum(lo, 0)
    hi = np.minimum(hi, c)

    out = np.zeros(c.shape, dtype='float64')
    upper = (lo > c*s) & (lo <= hi)
    lower = ~upper & (lo <= hi)
    cu, su = c[upper], s[upper]
    out[upper] = _sf(cu, su, lo[upper]) - _sf(cu, su, hi[upper] + 1)
    cl, sl = c[lower], s[lower]
    out[lower] = _cdf(cl, sl, hi[lower]) - _cdf(cl, sl, lo[lower] - 1)
    out = np.clip(out, 0.0, 1.0).reshape(shape)
    return _as_result(out)


@dataclass(frozen=True)
class BinomialRange:
    """the event lo <= X <= hi for X ~ Binomial(trials, success_prob)"""
    trials: int
    success_prob: float
    lo: int
    hi: int

    def clamped(self):
        """clamped (lo, hi), or None for an empty range"""
        lo, hi = max(self.lo, 0), min(self.hi, self.trials)
        if lo > hi:
            return None
        return lo, hi

    def probability(self):
        return binom_cdf_range(self.trials, self.success_prob, self.lo, self.hi)


def stable_sum(terms):
    """compensated sum of signed terms

    terms may be a sequence of floats, a numpy array, or a sequence of
    numpy arrays (chunks).  The result is exactly rounded (math.fsum),
    so it does not depend on how the terms were split into chunks.
    """
    if isinstance(terms, np.ndarray):
        return math.fsum(terms.ravel().tolist())
    parts = (np.ravel(t).tolist() if isinstance(t, np.ndarray) else (t,)
             for t in terms)
    return math.fsum(chain.from_iterable(parts))


def _planar_strip_integrand(theta, half):
    cos = math.cos(theta)
    if cos <= 0:
        return 1.0
    radius = half/cos
    if radius > 700:
        return 1.0
    return 1.0 - (1.0 + radius)*math.exp(-radius)


def planar_laplace_tv(d01):
    """total variation between planar Laplace densities e^{-|z|}/(2 pi)
    centered d01 apart

    The value is the mass that one of the two distributions puts
    on the strip of half-width d01/2 around its center line.  In polar
    coordinates around the center, the radial integral has the closed
    form 1 - (1+R) e^{-R} with R = (d01/2)/cos(theta), leaving a smooth
    1-D integral over theta.
    """
    d01 = float(d01)
    if not d01 >= 0:
        raise ParameterError(f"planar Laplace distance must be >= 0, got {d01}")
    if d01 == 0:
        return 0.0
    half = d01/2.0
    val, err = integrate.quad(_planar_strip_integrand, 0.0, math.pi/2,
                              args=(half,), epsabs=1.e-13, epsrel=1.e-12,
                              limit=200)
    logger.debug("planar_laplace_tv(%g): quad error estimate %.2e", d01, err)
    return min(1.0, max(0.0, 2.0*val/math.pi))
