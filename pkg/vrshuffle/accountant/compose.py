#!/usr/bin/env python
"""
Sequential composition of privacy curves through discrete PLDs.

The PLD of K rounds is the K-fold convolution of the per-round PLDs,
done with scipy.signal.fftconvolve.  K identical rounds use repeated
squaring, so only log2(K) convolutions are needed.
"""
import math
import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import signal

from ..errors import ParameterError
from ..divergence import DEFAULT_OPTIONS, subsample_delta, _check_gamma
from ..bounds import BoundRequest, upper_bound
from .curves import (PrivacyCurve, DiscretePLD, aligned_grid, curve_from_function,
                     curve_on_grid, discretize_curve, normalized_masses)

logger = logging.getLogger(__name__)

MESH_TOL = 1.e-12


@dataclass(frozen=True)
class CompositionPlan:
    """composition settings

    K            number of rounds
    eps_error    additive error allowed in eps
    delta_error  additive error allowed in delta
    gamma        Poisson subsampling rate per round, None for no subsampling
    homogeneous  use repeated squaring when all rounds are identical
    mesh         PLD grid spacing, None for eps_error/sqrt(K log(1/delta_error))
    eps_upper    PLD grid half-width, None for the single-round upper bound
                 at delta_error/K
    points       number of eps values in the output curve
    """
    K: int = 1
    eps_error: float = 0.01
    delta_error: float = 1.e-8
    gamma: Optional[float] = None
    homogeneous: bool = True
    mesh: Optional[float] = None
    eps_upper: Optional[float] = None
    points: int = 41

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ParameterError(f"K must be a positive integer, got {self.K}")
        if not self.eps_error > 0:
            raise ParameterError(f"eps_error must be > 0, got {self.eps_error}")
        if not 0 < self.delta_error < 1:
            raise ParameterError(f"delta_error must be in (0, 1), got {self.delta_error}")
        if self.gamma is not None:
            _check_gamma(self.gamma)
        if self.mesh is not None and not self.mesh > 0:
            raise ParameterError(f"mesh must be > 0, got {self.mesh}")
        if self.eps_upper is not None and not self.eps_upper > 0:
            raise ParameterError(f"eps_upper must be > 0, got {self.eps_upper}")
        if int(self.points) != self.points or self.points < 2:
            raise ParameterError(f"points must be an integer >= 2, got {self.points}")

    def default_mesh(self):
        return self.eps_error/math.sqrt(self.K*math.log(1/self.delta_error))

    def resolved_mesh(self):
        return self.default_mesh() if self.mesh is None else self.mesh


def _check_compatible(plds):
    if len(plds) == 0:
        raise ParameterError("compose needs at least one PLD")
    first = plds[0]
    for pld in plds[1:]:
        if not math.isclose(pld.mesh, first.mesh, rel_tol=MESH_TOL):
            raise ParameterError(f"PLD meshes differ: {first.mesh:g} and {pld.mesh:g}")
        if abs(pld.origin - first.origin) > 1.e-9*first.mesh:
            raise ParameterError(f"PLD grid origins differ: {first.origin:g} and "
                                 f"{pld.origin:g}")


def _convolve(a, b):
    masses = np.maximum(signal.fftconvolve(a.masses, b.masses), 0.0)
    inf_mass = a.inf_mass + b.inf_mass - a.inf_mass*b.inf_mass
    masses = normalized_masses(masses, inf_mass)
    return DiscretePLD(origin=a.origin + b.origin, mesh=a.mesh, masses=masses,
                       inf_mass=inf_mass)


def _power(pld, K):
    "K-fold self convolution by repeated squaring"
    result, base = None, pld
    while K:
        if K & 1:
            result = base if result is None else _convolve(result, base)
        K >>= 1
        if K:
            base = _convolve(base, base)
    return result


def _identical(plds):
    first = plds[0]
    return all(p is first or (p.inf_mass == first.inf_mass
                              and np.array_equal(p.masses, first.masses))
               for p in plds[1:])


def compose_pld(plds, homogeneous=True, K=None):
    """composed DiscretePLD of the rounds in plds

    A single PLD with K > 1 stands for K identical rounds.
    """
    plds = list(plds)
    _check_compatible(plds)
    if len(plds) == 1 and K is not None and K > 1:
        plds = plds*int(K)
    if homogeneous and len(plds) > 1 and _identical(plds):
        out = _power(plds[0], len(plds))
    else:
        out = plds[0]
        for pld in plds[1:]:
            out = _convolve(out, pld)
    logger.debug("composed %d PLDs onto %d grid points", len(plds), len(out.masses))
    return out


def _output_grid(pld, plan):
    top = pld.epsilon(plan.delta_error)
    if math.isinf(top):
        top = max(pld.max_loss, 0.0)
    top = max(top, pld.mesh)
    return np.linspace(0.0, top, int(plan.points))


def _composed_curve(forward, backward, plan):
    grid = _output_grid(forward, plan)
    fwd = forward.delta(grid)
    bwd = fwd if backward is forward else backward.delta(grid)
    return PrivacyCurve(grid, fwd, bwd)


@dataclass(frozen=True, eq=False)
class CompositionResult:
    """composed curve with the composed PLDs of both directions"""
    curve: PrivacyCurve
    forward: DiscretePLD
    backward: DiscretePLD

    def epsilon(self, delta):
        """smallest eps with both composed deltas <= delta"""
        return max(self.forward.epsilon(delta), self.backward.epsilon(delta))


def compose(plds, plan=None, backward_plds=None):
    """privacy curve of the sequential composition of the rounds in plds

    Arguments
    ---------
    plds           list of forward DiscretePLD sharing mesh and origin
    plan           CompositionPlan; a single PLD is repeated plan.K times
    backward_plds  PLDs of the backward direction, None to reuse plds

    Returns
    -------
    PrivacyCurve on points evenly spaced over [0, eps] where the composed
    forward delta reaches plan.delta_error.
    """
    plan = CompositionPlan() if plan is None else plan
    forward = compose_pld(plds, homogeneous=plan.homogeneous, K=plan.K)
    backward = forward
    if backward_plds is not None:
        backward = compose_pld(backward_plds, homogeneous=plan.homogeneous, K=plan.K)
    return _composed_curve(forward, backward, plan)


def _eps_upper(params_list, plan, rounds, options):
    if plan.eps_upper is not None:
        return plan.eps_upper
    target = plan.delta_error/rounds
    eps = 0.0
    for params in params_list:
        eps = max(eps, upper_bound(BoundRequest(params, target), options).eps)
    return eps


def _subsampled_curve(params, gamma, grid, options):
    def func(eps, direction):
        branch = 'add' if eps >= 0 else 'remove'
        return subsample_delta(float(eps), params, gamma, branch, options=options)
    return curve_from_function(func, grid, threads=options.threads)


def round_plds(params_list, plan, rounds, options=None):
    """forward and backward PLDs for each distinct round, on one shared grid"""
    options = DEFAULT_OPTIONS if options is None else options
    mesh = plan.resolved_mesh()
    eps_upper = max(_eps_upper(params_list, plan, rounds, options), mesh)
    grid = aligned_grid(eps_upper, mesh)
    logger.debug("round PLDs: mesh=%.4g eps_upper=%.4g grid points=%d", mesh,
                 eps_upper, len(grid))
    forward, backward = [], []
    for params in params_list:
        if plan.gamma is None or plan.gamma == 1:
            curve = curve_on_grid(params, grid, options)
        else:
            curve = _subsampled_curve(params, plan.gamma, grid, options)
        forward.append(discretize_curve(curve, 'forward'))
        backward.append(discretize_curve(curve, 'backward'))
    return forward, backward


def compose_params(params_list, plan=None, options=None):
    """end-to-end composition from round parameters

    Arguments
    ---------
    params_list  list of VariationRatioParams, one per round; a single
                 entry is repeated plan.K times
    plan         CompositionPlan
    options      DivergenceOptions

    Returns
    -------
    CompositionResult
    """
    plan = CompositionPlan() if plan is None else plan
    params_list = list(params_list)
    if len(params_list) == 0:
        raise ParameterError("compose_params needs at least one round")
    rounds = plan.K if len(params_list) == 1 else len(params_list)
    if len(params_list) > 1 and plan.K not in (1, rounds):
        raise ParameterError(f"K={plan.K} does not match {rounds} round parameters")
    plan = replace(plan, K=rounds)
    forward, backward = round_plds(params_list, plan, rounds, options)
    K = rounds if len(params_list) == 1 else None
    fwd = compose_pld(forward, homogeneous=plan.homogeneous, K=K)
    bwd = compose_pld(backward, homogeneous=plan.homogeneous, K=K)
    return CompositionResult(_composed_curve(fwd, bwd, plan), fwd, bwd)


def compose_subsampled(params, gamma, K, plan=None, options=None):
    """composition of K rounds of params, each Poisson subsampled at gamma

    The 'add' branch of the subsampled divergence gives delta for eps >= 0
    and the 'remove' branch for eps < 0.
    """
    plan = CompositionPlan() if plan is None else plan
    plan = replace(plan, K=K, gamma=gamma)
    return compose_params([params], plan, options).curve

