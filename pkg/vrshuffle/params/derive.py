#!/usr/bin/env python
"""
Amplification parameters from first principles: explicit mechanism
matrices, the worst-case input pair of the lower bound, and parallel
composition of several randomizers that share a local budget.
"""
import math
import logging

import numpy as np

from ..errors import ParameterError, UnboundedRatioError
from .types import (VariationRatioParams, AsymmetricParams, MechanismSpec,
                    DEGENERATE_P)

logger = logging.getLogger(__name__)

REL_TOL = 1.e-12


def _ratio_max(num, den):
    """max of num/den, with 0/0 = 1 and x/0 = +inf"""
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = np.where(num == 0, 1.0, np.where(den == 0, np.inf, num/den))
    return float(np.max(ratio))


def derive_variation_ratio(spec, n_blanket=0):
    """derive (p, beta, q) from an explicit randomizer

    Arguments
    ---------
    spec       MechanismSpec (or anything MechanismSpec.from_dict accepts)
    n_blanket  number of blanket messages [0]

    Returns
    -------
    VariationRatioParams.  Identical rows give p = 1 + 1e-12, beta = 0,
    flagged as degenerate.
    """
    if not isinstance(spec, MechanismSpec):
        spec = MechanismSpec.from_dict(spec)
    rows, blankets = spec.matrix, spec.blankets

    p = _ratio_max(rows[:, None, :], rows[None, :, :])
    beta = float(np.max(0.5*np.abs(rows[:, None, :] - rows[None, :, :]).sum(axis=2)))
    q = _ratio_max(rows[:, None, :], blankets[None, :, :])
    if math.isinf(q):
        raise UnboundedRatioError("q is unbounded: a blanket distribution assigns "
                                  "zero probability to a supported output")
    logger.debug("derived p=%g beta=%g q=%g from %d x %d matrix", p, beta, q,
                 *rows.shape)
    if p <= 1 or beta == 0:
        return VariationRatioParams(DEGENERATE_P, 0.0, q, n_blanket=n_blanket,
                                    degenerate=True)
    return VariationRatioParams(p, min(beta, 1.0), q, n_blanket=n_blanket)


def _probability_vector(name, vec):
    vec = np.asarray(vec, dtype='float64').ravel()
    if vec.size == 0 or np.any(vec < 0) or abs(vec.sum() - 1) > 1.e-12:
        raise ParameterError(f"{name} must be a non-negative vector summing to 1")
    return vec


def derive_lower_params(dist0, dist1, candidate_blankets, n_blanket=0):
    """lower-bound parameters for the input pair (dist0, dist1)

    Arguments
    ---------
    dist0, dist1        output distributions of the two differing inputs
    candidate_blankets  output distributions available for the other users
    n_blanket           number of blanket messages [0]

    Returns
    -------
    AsymmetricParams

    Notes
    -----
    p is the mass ratio over the region where dist1 > dist0, beta the total
    variation.  For each candidate x, q1 is the ratio of dist1 mass to x mass
    over that region and q0 the ratio of dist0 mass to x mass over the region
    where dist0 > dist1.  The candidate with the largest min(q0, q1) is used;
    the first one wins ties.
    """
    d0 = _probability_vector('dist0', dist0)
    d1 = _probability_vector('dist1', dist1)
    cands = [_probability_vector('candidate blanket', c) for c in candidate_blankets]
    if len(cands) == 0:
        raise ParameterError("candidate blanket set is empty")
    if any(c.size != d0.size for c in cands) or d1.size != d0.size:
        raise ParameterError("all distributions must share the same output set")

    up, down = d1 > d0, d1 < d0
    if not up.any():
        return AsymmetricParams(DEGENERATE_P, 0.0, 1.0, 1.0, n_blanket=n_blanket,
                                degenerate=True)
    mass1, mass0 = d1[up].sum(), d0[down].sum()
    p = math.inf if d0[up].sum() == 0 else mass1/d0[up].sum()
    beta = float((d1 - d0)[up].sum())

    best, best_score = None, -1.0
    for cand in cands:
        xu, xd = cand[up].sum(), cand[down].sum()
        if xu == 0 or xd == 0:
            continue
        q1, q0 = mass1/xu, mass0/xd
        score = min(q0, q1)
        if score > best_score:
            best, best_score = (q0, q1), score
    if best is None:
        raise UnboundedRatioError("every candidate blanket has zero mass on one of the "
                                  "two output regions")
    q0, q1 = best
    return AsymmetricParams(p, min(beta, 1.0), q0, q1, n_blanket=n_blanket)


def parallel_compose(base, weights):
    """parallel composition: each user answers one of several queries

    Arguments
    ---------
    base     list of VariationRatioParams, all with p = q = e^eps0
    weights  probability of each query being chosen

    Returns
    -------
    VariationRatioParams with beta = sum(weights*beta)
    """
    base = list(base)
    weights = np.asarray(weights, dtype='float64').ravel()
    if len(base) == 0 or len(base) != weights.size:
        raise ParameterError("need one weight per base mechanism")
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1.e-9:
        raise ParameterError("weights must be non-negative and sum to 1")
    p, q = base[0].p, base[0].q
    for par in base:
        if not (math.isclose(par.p, p, rel_tol=REL_TOL)
                and math.isclose(par.q, q, rel_tol=REL_TOL)):
            raise ParameterError("parallel composition needs a common p and q")
    if not math.isclose(p, q, rel_tol=REL_TOL):
        raise ParameterError("parallel composition needs p = q = e^eps0")
    beta = math.fsum(w*par.beta for w, par in zip(weights, base))
    return VariationRatioParams(p, beta, q, n_blanket=base[0].n_blanket)


def hierarchical_params(eps0, d, H, n_blanket=0):
    """hierarchical range queries over d buckets with H tree levels

    Each user picks a level h uniformly and reports its node with
    k-randomized response over d/2^h values.
    """
    from .catalog import krr
    if int(H) != H or H < 1:
        raise ParameterError(f"H must be a positive integer, got {H}")
    H = int(H)
    if d/2**(H - 1) < 2:
        raise ParameterError(f"d/2^(H-1) must be >= 2, got d={d}, H={H}")
    base = [VariationRatioParams(*krr(eps0, d/2**h), n_blanket=n_blanket)
            for h in range(H)]
    return parallel_compose(base, [1.0/H]*H)
