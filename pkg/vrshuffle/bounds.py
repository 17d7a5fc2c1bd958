#!/usr/bin/env python
"""
(eps, delta) bounds for the shuffle model.

  upper_bound        binary search of the symmetric divergence
  lower_bound        binary search of the asymmetric divergence
  oracle_bound       binary search driven by the brute-force divergence
  analytic_bound     closed form, valid under two preconditions
  asymptotic_bound   simpler closed form for large n
"""
import math
import logging
from dataclasses import dataclass
from typing import Optional

from .errors import ParameterError, UnsupportedRegimeError
from .params import VariationRatioParams, AsymmetricParams
from .divergence import (HockeyStickQuery, brute_force_delta, MAX_EPS,
                         BRUTE_FORCE_MAX_N)

logger = logging.getLogger(__name__)

DEFAULT_ITERS = 20
MAX_DOUBLINGS = 10


@dataclass(frozen=True)
class BoundRequest:
    """parameters and target delta for a binary-search bound"""
    params: object
    delta: float
    iters: int = DEFAULT_ITERS

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ParameterError(f"delta must be in (0, 1), got {self.delta}")
        if int(self.iters) != self.iters or self.iters < 1:
            raise ParameterError(f"iters must be a positive integer, got {self.iters}")


@dataclass(frozen=True)
class BoundResult:
    """result of a binary-search bound

    eps          returned budget (eps_high for upper bounds, eps_low for lower)
    kind         'upper' or 'lower'
    resolution   eps_high - eps_low = cap/2^iters
    evaluations  number of divergence calls
    """
    eps: float
    kind: str
    resolution: float
    evaluations: int
    eps_low: float = 0.0
    eps_high: float = 0.0
    cap: float = 0.0
    delta_high: Optional[float] = None


@dataclass(frozen=True)
class ClosedFormBound:
    """closed-form budget, or the precondition that failed"""
    kind: str
    eps: Optional[float] = None
    failed: Optional[str] = None

    @property
    def holds(self):
        return self.failed is None


class _Counter:
    """max(forward, backward) divergence as a function of eps, counting calls"""
    def __init__(self, func):
        self.func = func
        self.evaluations = 0

    def __call__(self, eps):
        self.evaluations += 2
        return max(self.func(eps, 'forward'), self.func(eps, 'backward'))


def _search_cap(params, delta, max_delta):
    """log(p), or a doubling search from 1 when p = +inf"""
    if params.finite:
        return math.log(params.p)
    cap = 1.0
    for _ in range(MAX_DOUBLINGS + 1):
        if cap > MAX_EPS:
            break
        if max_delta(cap) <= delta:
            logger.debug("search cap %g found by doubling", cap)
            return cap
        cap *= 2
    raise UnsupportedRegimeError(f"no eps below {MAX_EPS:g} reaches delta={delta:g}: the "
                                 "distinguishing mass of the pair exceeds delta")


def _bisect(max_delta, delta, cap, iters):
    eps_low, eps_high = 0.0, cap
    delta_high = None
    for _ in range(iters):
        mid = (eps_low + eps_high)/2
        val = max_delta(mid)
        logger.debug("search eps=%.10g max-delta=%.6g", mid, val)
        if val > delta:
            eps_low = mid
        else:
            eps_high, delta_high = mid, val
    if delta_high is None:
        delta_high = max_delta(eps_high)
    return eps_low, eps_high, delta_high


def _run_search(req, func, kind, use_high, cap=None):
    params = req.params
    if params.beta == 0:
        return BoundResult(0.0, kind, 0.0, 0)
    max_delta = _Counter(func)
    if cap is None:
        cap = _search_cap(params, req.delta, max_delta)
    eps_low, eps_high, delta_high = _bisect(max_delta, req.delta, cap, req.iters)
    eps = eps_high if use_high else eps_low
    return BoundResult(eps=eps, kind=kind, resolution=cap/2**req.iters,
                       evaluations=max_delta.evaluations, eps_low=eps_low,
                       eps_high=eps_high, cap=cap, delta_high=delta_high)


def upper_bound(req, options=None):
    """numerical upper bound on the amplified budget

    Arguments
    ---------
    req      BoundRequest with VariationRatioParams
    options  DivergenceOptions for the divergence engine

    Returns
    -------
    BoundResult with eps = eps_high, the smallest threshold found with
    max(D(P||Q), D(Q||P)) <= delta.
    """
    if not isinstance(req.params, VariationRatioParams):
        raise ParameterError("upper_bound needs VariationRatioParams")

    def func(eps, direction):
        return HockeyStickQuery(eps, req.params).evaluate(direction, options)
    return _run_search(req, func, 'upper', use_high=True)


def upper_bound_batch(params, deltas, iters=DEFAULT_ITERS, options=None):
    """upper bounds for several target deltas, sharing one search cap"""
    reqs = [BoundRequest(params, d, iters) for d in deltas]
    if len(reqs) == 0:
        return []
    if not isinstance(params, VariationRatioParams):
        raise ParameterError("upper_bound_batch needs VariationRatioParams")
    if params.beta == 0:
        return [upper_bound(r, options) for r in reqs]

    def func(eps, direction):
        return HockeyStickQuery(eps, params).evaluate(direction, options)
    cap = _search_cap(params, min(deltas), _Counter(func))
    return [_run_search(r, func, 'upper', use_high=True, cap=cap) for r in reqs]


def lower_bound(req, mode='lower', options=None):
    """lower bound on the amplified budget from the asymmetric pair

    mode 'lower' returns eps_low, the last threshold whose divergence
    exceeds delta; mode 'tight-upper' returns eps_high instead.
    """
    if mode not in ('lower', 'tight-upper'):
        raise ParameterError(f"mode must be 'lower' or 'tight-upper', got '{mode}'")
    params = req.params
    if isinstance(params, VariationRatioParams):
        params = params.asymmetric()
    if not isinstance(params, AsymmetricParams):
        raise ParameterError("lower_bound needs AsymmetricParams")
    req = BoundRequest(params, req.delta, req.iters)

    def func(eps, direction):
        return HockeyStickQuery(eps, params).evaluate(direction, options)
    if mode == 'lower':
        return _run_search(req, func, 'lower', use_high=False)
    return _run_search(req, func, 'upper', use_high=True)


def oracle_bound(req, max_n=BRUTE_FORCE_MAX_N):
    """upper bound using the brute-force divergence (accepts r = 1/2)"""
    params = req.params
    if not isinstance(params, (VariationRatioParams, AsymmetricParams)):
        raise ParameterError("oracle_bound needs VariationRatioParams or AsymmetricParams")

    def func(eps, direction):
        return brute_force_delta(eps, params, direction, max_n=max_n)
    return _run_search(req, func, 'upper', use_high=True)


def amplification_ratio(eps0, eps):
    """local budget over amplified budget"""
    if eps == 0:
        return math.inf if eps0 > 0 else math.nan
    return eps0/eps


def _closed_form_check(kind, params, delta):
    if not isinstance(params, VariationRatioParams):
        raise ParameterError(f"{kind} bound needs VariationRatioParams")
    if not 0 < delta < 1:
        raise ParameterError(f"delta must be in (0, 1), got {delta}")


def analytic_bound(params, delta):
    """closed-form upper bound from a Chernoff/Hoeffding tail on C

    Returns ClosedFormBound; eps is None when a precondition fails.
    """
    _closed_form_check('analytic', params, delta)
    if params.beta == 0:
        return ClosedFormBound('analytic', eps=0.0)
    beta, alpha, g, r, q = params.beta, params.alpha, params.null_weight, params.r, params.q
    inv_p, n = params.inv_p, params.n_users
    if r >= 0.5:
        return ClosedFormBound('analytic', failed="r < 1/2")

    blanket = r/(1 - 2*r)
    if (params.p_alpha + alpha)/2 - g*blanket < 0:
        return ClosedFormBound('analytic', failed="(p+1)alpha/2 - (1-alpha-alpha*p)r/(1-2r) >= 0")

    log_term = math.log(4/delta)
    omega = 2*r*(n - 1) - math.sqrt(min(6*r, 0.5)*(n - 1)*log_term)
    # threshold numerator and denominator, both divided by p^2
    num = 2*(beta + 1)*(n - 1)*inv_p + 2*(beta - 1)*(n - 1) + beta*inv_p**2
    den = q*inv_p**2 + (beta - 1)*inv_p + (beta + 1) - q*inv_p
    # signed ratio; den <= 0 is not a failure by itself
    threshold = num/den if den != 0 else math.copysign(math.inf, num)
    if omega < threshold:
        return ClosedFormBound('analytic', failed=("Omega >= (2p(beta+1+(beta-1)p)(n-1)+beta)/"
                                                   "(q+p(beta-1+(beta+1)p)-pq)"))
    if omega <= 0:
        return ClosedFormBound('analytic', failed="Omega > 0")

    root = math.sqrt(omega*log_term/2)
    denom = alpha*omega + beta*(omega/2 - root) + g*(n - 1 - omega)*blanket
    if denom <= 0:
        return ClosedFormBound('analytic', failed="positive denominator of the eps formula")
    return ClosedFormBound('analytic', eps=math.log1p(beta*(2*root + 1)/denom))


def asymptotic_bound(params, delta):
    """simplified closed-form upper bound, valid for n >= 8 log(2/delta)/r"""
    _closed_form_check('asymptotic', params, delta)
    if params.beta == 0:
        return ClosedFormBound('asymptotic', eps=0.0)
    beta, r, n = params.beta, params.r, params.n_users
    if r >= 0.5:
        return ClosedFormBound('asymptotic', failed="r < 1/2")
    if n < 8*math.log(2/delta)/r:
        return ClosedFormBound('asymptotic', failed="n >= 8log(2/delta)(p-1)q/(beta p)")
    if n < 2:
        return ClosedFormBound('asymptotic', failed="n >= 2")
    c = max(0.0, (4/9)*(1 - 3*r)/(1 - 2*r))
    spread = (params.p_alpha + params.alpha)
    scale = beta/((1 - c)*spread + c)
    tail = math.sqrt(32*math.log(4/delta)/(r*(n - 1))) + 4/(r*n)
    return ClosedFormBound('asymptotic', eps=math.log1p(scale*tail))
