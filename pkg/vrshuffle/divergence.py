#!/usr/bin/env python
"""
Hockey-stick divergence of the dominating pair (P, Q).

With C ~ Binomial(n_blanket, r0 + r1) blanket messages, of which
A ~ Binomial(C, r0/(r0 + r1)) land in the first half of the output space,

    P = (A + D1, C - A + D2),    Q = (A + D2, C - A + D1)

where (D1, D2) is (1, 0) with probability p*alpha, (0, 1) with
probability alpha and (0, 0) otherwise.  The symmetric case has
r0 = r1 = r.

The fast engine evaluates D_{e^eps}(P||Q) as an expectation over C of
binomial range probabilities: the probability ratio P/Q is increasing in
A for fixed C, so each slice C = c contributes the exact positive part
through three incomplete-beta range calls.  The brute-force engine
enumerates every outcome (a, b) and is used as an oracle.
"""
import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import ParameterError, UnsupportedRegimeError, SizeLimitError
from .numerics import binom_pmf, binom_logpmf, binom_cdf_range, stable_sum
from .params import VariationRatioParams, AsymmetricParams
from .params.types import TOL

logger = logging.getLogger(__name__)

MAX_EPS = 700.0
BRUTE_FORCE_MAX_N = 5000
DIRECTIONS = ('forward', 'backward')


@dataclass(frozen=True)
class DivergenceOptions:
    """engine knobs

    trunc_delta  binomial tail mass (both tails together) that may be
                 skipped; the skipped mass is added to the result
    threads      worker threads for the sum over c
    chunk_size   number of c values evaluated per numpy block
    """
    trunc_delta: float = 1.e-18
    threads: int = 1
    chunk_size: int = 1 << 16

    def __post_init__(self):
        if not 0 <= self.trunc_delta < 1:
            raise ParameterError(f"trunc_delta must be in [0, 1), got {self.trunc_delta}")
        if int(self.threads) != self.threads or self.threads < 1:
            raise ParameterError(f"threads must be a positive integer, got {self.threads}")
        if self.chunk_size < 1:
            raise ParameterError("chunk_size must be >= 1")


DEFAULT_OPTIONS = DivergenceOptions()


@dataclass(frozen=True)
class HockeyStickQuery:
    """D_{e^eps} of the dominating pair for params"""
    eps: float
    params: object

    def evaluate(self, direction='forward', options=None):
        if isinstance(self.params, AsymmetricParams):
            return delta_asymmetric(self.eps, self.params, direction, options=options)
        if direction == 'forward':
            return delta_forward(self.eps, self.params, options=options)
        if direction == 'backward':
            return delta_backward(self.eps, self.params, options=options)
        raise ParameterError(f"direction must be 'forward' or 'backward', got '{direction}'")

    def max_delta(self, options=None):
        """max of the forward and backward divergence"""
        return max(self.evaluate('forward', options), self.evaluate('backward', options))


def _check_direction(direction):
    if direction not in DIRECTIONS:
        raise ParameterError(f"direction must be 'forward' or 'backward', got '{direction}'")


def _trivial_delta(eps, params):
    """value of the divergence where it does not depend on n, or None"""
    if params.beta == 0:
        return max(0.0, -math.expm1(eps))
    if params.finite:
        logp = math.log(params.p)
        if eps >= logp:
            return 0.0
        if eps <= -logp:
            return -math.expm1(eps)
    if abs(eps) > MAX_EPS:
        raise UnsupportedRegimeError(f"|eps| = {abs(eps):g} is too large to evaluate")
    return None


def _c_range(n_blanket, rho, trunc_delta):
    """range of blanket counts to evaluate and the binomial mass skipped"""
    if rho <= 0:
        return 0, 0, 0.0
    if rho >= 1:
        return n_blanket, n_blanket, 0.0
    if trunc_delta <= 0 or n_blanket < 64:
        return 0, n_blanket, 0.0
    dist = stats.binom(n_blanket, rho)
    c_lo = int(max(0, dist.ppf(trunc_delta/2)))
    c_hi = int(min(n_blanket, dist.isf(trunc_delta/2)))
    skipped = 0.0
    if c_lo > 0:
        skipped += float(dist.cdf(c_lo - 1))
    if c_hi < n_blanket:
        skipped += float(dist.sf(c_hi))
    return c_lo, c_hi, skipped


class _Expectation:
    """the sum over c of one divergence direction, evaluated in blocks"""

    def __init__(self, eps, params, q0, q1, direction):
        self.direction = direction
        self.n_blanket = params.n_blanket
        self.v, self.u, self.g = params.p_alpha, params.alpha, params.null_weight
        self.inv_p = params.inv_p
        self.q0, self.q1 = q0, q1
        r0, r1 = self.v/q0, self.v/q1
        self.rho = r0 + r1
        self.s = 0.5 if self.rho == 0 else r0/self.rho
        if self.rho >= 1:
            if self.rho > 1 + TOL or self.g > TOL:
                raise UnsupportedRegimeError(
                    f"blanket probability r0 + r1 = {self.rho:.10g} >= 1 with null weight "
                    f"{self.g:.3g} is outside the fast engine; use the brute-force oracle "
                    "(vr oracle)")
            # every blanket message is spent and no user sends nothing
            self.rho, self.g = 1.0, 0.0
        self.f_scale = 0.0 if self.g == 0 else self.g/(1.0 - self.rho)
        self.exp_eps = math.exp(eps)
        # forward thresholds use e^eps, backward thresholds e^-eps
        self.t = self.exp_eps if direction == 'forward' else math.exp(-eps)

    def threshold(self, c):
        """value of a where P/Q crosses e^eps (forward) or e^-eps (backward)"""
        t, n = self.t, self.n_blanket + 1
        num = c*self.q1*(t - self.inv_p) + (t - 1.0)*self.f_scale*(n - c)
        den = self.q0*(1.0 - t*self.inv_p) + self.q1*(t - self.inv_p)
        return num/den

    def block(self, c):
        """weighted terms for the blanket counts in the int array c"""
        v, u, g, s, E = self.v, self.u, self.g, self.s, self.exp_eps
        w = binom_pmf(self.n_blanket, self.rho, c)
        cmax = c + 1
        thr_next = self.threshold(c + 1)
        thr = self.threshold(c)
        if self.direction == 'forward':
            k0 = np.clip(np.ceil(thr_next - 1), -1, cmax).astype('int64')
            k1 = np.clip(np.ceil(thr_next), -1, cmax).astype('int64')
            km = np.clip(np.ceil(thr), -1, cmax).astype('int64')
            terms = ((v - E*u)*binom_cdf_range(c, s, k0, c)
                     + (u - E*v)*binom_cdf_range(c, s, k1, c)
                     + g*(1.0 - E)*binom_cdf_range(c, s, km, c))
        else:
            k0 = np.clip(np.floor(thr_next - 1), -1, cmax).astype('int64')
            k1 = np.clip(np.floor(thr_next), -1, cmax).astype('int64')
            km = np.clip(np.floor(thr), -1, cmax).astype('int64')
            terms = ((u - E*v)*binom_cdf_range(c, s, 0, k0)
                     + (v - E*u)*binom_cdf_range(c, s, 0, k1)
                     + g*(1.0 - E)*binom_cdf_range(c, s, 0, km))
        return w*terms

    def evaluate(self, options):
        c_lo, c_hi, skipped = _c_range(self.n_blanket, self.rho, options.trunc_delta)
        chunks = [np.arange(start, min(start + options.chunk_size, c_hi + 1), dtype='int64')
                  for start in range(c_lo, c_hi + 1, options.chunk_size)]
        if options.threads > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=options.threads) as pool:
                parts = list(pool.map(self.block, chunks))
        else:
            parts = [self.block(c) for c in chunks]
        total = stable_sum(parts)
        logger.debug("%s expectation: c in [%d, %d], skipped mass %.3g, value %.6g",
                     self.direction, c_lo, c_hi, skipped, total)
        return min(1.0, max(0.0, total + skipped))


def _expectation(eps, params, q0, q1, direction, options):
    options = DEFAULT_OPTIONS if options is None else options
    trivial = _trivial_delta(eps, params)
    if trivial is not None:
        return trivial
    return _Expectation(eps, params, q0, q1, direction).evaluate(options)


def _check_symmetric(params):
    if not isinstance(params, VariationRatioParams):
        raise ParameterError("expected VariationRatioParams")
    if params.beta > 0 and params.r >= 0.5:
        raise UnsupportedRegimeError(
            f"r = {params.r:.10g} >= 1/2 is outside the fast engine (the blanket term "
            "divides by 1 - 2r); use the brute-force oracle (vr oracle)")


def delta_forward(eps, params, options=None):
    """D_{e^eps}(P || Q) for symmetric parameters

    Arguments
    ---------
    eps      log-ratio threshold, any sign
    params   VariationRatioParams with r < 1/2
    options  DivergenceOptions [DEFAULT_OPTIONS]

    Returns
    -------
    divergence in [0, 1]
    """
    _check_symmetric(params)
    return _expectation(eps, params, params.q, params.q, 'forward', options)


def delta_backward(eps, params, options=None):
    """D_{e^eps}(Q || P) for symmetric parameters"""
    _check_symmetric(params)
    return _expectation(eps, params, params.q, params.q, 'backward', options)


def delta_asymmetric(eps, params, direction='forward', options=None):
    """D_{e^eps}(P || Q) ('forward') or D_{e^eps}(Q || P) ('backward')
    for lower-bound parameters (p, beta, q0, q1)
    """
    _check_direction(direction)
    if not isinstance(params, AsymmetricParams):
        raise ParameterError("expected AsymmetricParams")
    return _expectation(eps, params, params.q0, params.q1, direction, options)


def _blanket_probs(params):
    if isinstance(params, AsymmetricParams):
        return params.r0, params.r1
    return params.r, params.r


def _enumerate_pmfs(params, max_n=BRUTE_FORCE_MAX_N):
    """yield (P, Q) mass arrays over a = 0..c for each total c = a + b

    The blanket counts (A, B) follow a trinomial law, written here as
    Binomial(n_blanket, r0 + r1) for C times Binomial(C, s) for A.
    """
    n_blanket = params.n_blanket
    if n_blanket > max_n:
        raise SizeLimitError(f"n_blanket = {n_blanket} exceeds the enumeration cap {max_n}")
    r0, r1 = _blanket_probs(params)
    rho = min(1.0, r0 + r1)
    s = 0.5 if rho == 0 else r0/rho
    v, u, g = params.p_alpha, params.alpha, params.null_weight

    def trinomial(i, c):
        "mass of (A, B) = (i, c - i)"
        if c < 0 or c > n_blanket:
            return np.zeros(len(i))
        lw = binom_logpmf(n_blanket, rho, c)
        return np.exp(lw + binom_logpmf(c, s, i))

    for c in range(n_blanket + 2):
        a = np.arange(c + 1, dtype='int64')
        t_first = trinomial(a - 1, c - 1)
        t_second = trinomial(a, c - 1)
        t_none = trinomial(a, c)
        pmass = v*t_first + u*t_second + g*t_none
        qmass = u*t_first + v*t_second + g*t_none
        yield pmass, qmass


def brute_force_delta(eps, params, direction='forward', max_n=BRUTE_FORCE_MAX_N):
    """divergence by enumeration of every outcome (a, b), a + b <= n

    Accepts VariationRatioParams (including r = 1/2) and AsymmetricParams.
    Quadratic in n_blanket, capped at max_n.
    """
    _check_direction(direction)
    if abs(eps) > MAX_EPS:
        raise UnsupportedRegimeError(f"|eps| = {abs(eps):g} is too large to evaluate")
    E = math.exp(eps)
    parts = []
    for pmass, qmass in _enumerate_pmfs(params, max_n=max_n):
        if direction == 'forward':
            parts.append(np.maximum(0.0, pmass - E*qmass))
        else:
            parts.append(np.maximum(0.0, qmass - E*pmass))
    return min(1.0, stable_sum(parts))


def brute_force_mixture_delta(eps, params, gamma, direction='add',
                              max_n=BRUTE_FORCE_MAX_N):
    """divergence of the subsampled pair by enumeration

    'add':    D_{e^eps}((1-gamma) Q + gamma P || Q)
    'remove': D_{e^eps}(P || (1-gamma) P + gamma Q)
    """
    _check_gamma(gamma)
    E = math.exp(eps)
    parts = []
    for pmass, qmass in _enumerate_pmfs(params, max_n=max_n):
        if direction == 'add':
            parts.append(np.maximum(0.0, (1 - gamma)*qmass + gamma*pmass - E*qmass))
        elif direction == 'remove':
            parts.append(np.maximum(0.0, pmass - E*((1 - gamma)*pmass + gamma*qmass)))
        else:
            raise ParameterError(f"direction must be 'add' or 'remove', got '{direction}'")
    return min(1.0, stable_sum(parts))


def _check_gamma(gamma):
    if not 0 < gamma <= 1:
        raise ParameterError(f"sampling rate gamma must be in (0, 1], got {gamma}")


def subsample_delta(eps, params, gamma, direction='add', options=None):
    """divergence of the dominating pair after Poisson subsampling at rate gamma

    'add':    D_{e^eps}((1-gamma) Q + gamma P || Q)
              = gamma * D_{(e^eps + gamma - 1)/gamma}(P || Q)
    'remove': D_{e^eps}(P || (1-gamma) P + gamma Q)
              = (1 - e^eps (1-gamma)) * D_{e^eps gamma/(1 - e^eps (1-gamma))}(P || Q)

    When the leading coefficient is not positive the divergence reduces to
    1 - e^eps ('add') or 0 ('remove').
    """
    _check_gamma(gamma)
    if gamma == 1:
        return delta_forward(eps, params, options=options)
    if direction == 'add':
        base = math.expm1(eps) + gamma
        if base <= 0:
            return -math.expm1(eps)
        return gamma*delta_forward(math.log(base/gamma), params, options=options)
    if direction == 'remove':
        log_mix = eps + math.log1p(-gamma)
        coef = -math.expm1(log_mix) if log_mix < 0 else 0.0
        if coef <= 0:
            return 0.0
        threshold = eps + math.log(gamma) - math.log(coef)
        return coef*delta_forward(threshold, params, options=options)
    raise ParameterError(f"direction must be 'add' or 'remove', got '{direction}'")
