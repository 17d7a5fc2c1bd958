#!/usr/bin/env python
"""
Privacy curves and discrete privacy loss distributions.

A privacy curve maps eps to delta(P||Q)[eps] = D_{e^eps}(P||Q).  A discrete
PLD holds the distribution of log(P/Q) under P on a uniform grid, plus the
mass of outcomes that Q cannot produce.  Its implied curve is

    delta(eps) = inf_mass + sum_{l > eps} mass(l) (1 - e^{eps - l})

Both PLD constructions below round onto the grid by connecting the dots:
the implied curve equals the source curve at every grid point and lies
above it in between, since any privacy curve is convex in e^eps.
"""
import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ..errors import ParameterError, GridRangeError
from ..numerics import stable_sum
from ..divergence import (HockeyStickQuery, DEFAULT_OPTIONS, _enumerate_pmfs,
                          BRUTE_FORCE_MAX_N)

logger = logging.getLogger(__name__)

EXACT_PLD_MAX_N = 4000
MASS_TOL = 1.e-12
# floating point drift in computed masses that normalized_masses() absorbs
DRIFT_TOL = 1.e-9


@dataclass(frozen=True, eq=False)
class PrivacyCurve:
    """delta(eps) of a pair in both directions on a common eps grid"""
    grid: np.ndarray
    forward: np.ndarray
    backward: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype='float64').ravel()
        if grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise ParameterError("curve grid must be non-empty and strictly increasing")
        for name in ('forward', 'backward'):
            vals = np.asarray(getattr(self, name), dtype='float64').ravel()
            if vals.shape != grid.shape:
                raise ParameterError(f"{name} deltas must match the grid length")
            vals = np.clip(vals, 0.0, 1.0)
            # running max from the right keeps the curve non-increasing
            vals = np.maximum.accumulate(vals[::-1])[::-1]
            object.__setattr__(self, name, vals)
        object.__setattr__(self, 'grid', grid)

    @property
    def deltas(self):
        return np.maximum(self.forward, self.backward)

    def epsilon(self, delta):
        """smallest grid eps with max(forward, backward) <= delta, inf if none"""
        ok = np.nonzero(self.deltas <= delta)[0]
        if len(ok) == 0:
            return math.inf
        return float(self.grid[ok[0]])

    def rows(self):
        return list(zip(self.grid.tolist(), self.forward.tolist(), self.backward.tolist()))


def normalized_masses(masses, inf_mass):
    """rescale computed finite masses so that they and inf_mass sum to 1

    Drift beyond DRIFT_TOL is left in place for DiscretePLD to reject.
    """
    masses = np.asarray(masses, dtype='float64')
    total = stable_sum(masses)
    drift = total + inf_mass - 1
    if total > 0 and abs(drift) <= DRIFT_TOL:
        if abs(drift) > MASS_TOL:
            logger.debug("PLD mass drift %.3g removed", drift)
        masses = masses*((1 - inf_mass)/total)
    return masses


@dataclass(frozen=True, eq=False)
class DiscretePLD:
    """privacy loss masses on the grid origin + mesh*i, plus inf_mass"""
    origin: float
    mesh: float
    masses: np.ndarray
    inf_mass: float = 0.0

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype='float64').ravel()
        if not self.mesh > 0:
            raise ParameterError(f"PLD mesh must be > 0, got {self.mesh}")
        if masses.size == 0 or np.any(masses < 0):
            raise ParameterError("PLD masses must be a non-empty non-negative vector")
        if not 0 <= self.inf_mass <= 1:
            raise ParameterError(f"inf_mass must be in [0, 1], got {self.inf_mass}")
        total = stable_sum(masses) + self.inf_mass
        if abs(total - 1) > MASS_TOL:
            raise ParameterError(f"PLD masses sum to {total:.15g}, not 1")
        object.__setattr__(self, 'masses', masses)
        object.__setattr__(self, 'origin', float(self.origin))
        object.__setattr__(self, 'mesh', float(self.mesh))
        object.__setattr__(self, 'inf_mass', float(self.inf_mass))

    @property
    def losses(self):
        return self.origin + self.mesh*np.arange(len(self.masses))

    @property
    def max_loss(self):
        return self.origin + self.mesh*(len(self.masses) - 1)

    def delta(self, eps):
        """implied hockey-stick divergence at eps (scalar or array)"""
        if np.ndim(eps) > 0:
            return np.array([self.delta(e) for e in np.ravel(eps)])
        losses = self.losses
        above = losses > eps
        terms = self.masses[above]*(-np.expm1(eps - losses[above]))
        return min(1.0, self.inf_mass + stable_sum(terms))

    def epsilon(self, delta):
        """smallest eps >= 0 with implied delta(eps) <= delta, inf if none"""
        if self.inf_mass > delta:
            return math.inf
        if self.delta(0.0) <= delta:
            return 0.0
        top = max(self.max_loss, 0.0)
        if self.delta(top) > delta:
            return math.inf
        return optimize.brentq(lambda e: self.delta(e) - delta, 0.0, top,
                               xtol=1.e-14, rtol=4*np.finfo(float).eps)

    def curve(self, grid):
        """PrivacyCurve with this PLD's implied deltas in both directions"""
        vals = self.delta(np.asarray(grid, dtype='float64'))
        return PrivacyCurve(grid, vals, vals)


def aligned_grid(eps_upper, mesh):
    """uniform grid of mesh multiples covering [-eps_upper, eps_upper]"""
    if not mesh > 0:
        raise ParameterError(f"mesh must be > 0, got {mesh}")
    m = max(1, int(math.ceil(eps_upper/mesh - 1.e-9)))
    return mesh*np.arange(-m, m + 1, dtype='float64')


def curve_from_function(func, grid, threads=1):
    """PrivacyCurve from func(eps, direction) evaluated at every grid point"""
    grid = np.asarray(grid, dtype='float64')
    tasks = [(e, d) for d in ('forward', 'backward') for e in grid]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            vals = list(pool.map(lambda t: func(*t), tasks))
    else:
        vals = [func(*t) for t in tasks]
    npts = len(grid)
    return PrivacyCurve(grid, vals[:npts], vals[npts:])


def build_curve(params, eps_lo, eps_hi, points, options=None):
    """evaluate the forward and backward divergence on a uniform grid

    Arguments
    ---------
    params          VariationRatioParams or AsymmetricParams
    eps_lo, eps_hi  grid end points, eps_lo < eps_hi
    points          number of grid points, >= 2
    options         DivergenceOptions

    Returns
    -------
    PrivacyCurve
    """
    if not eps_lo < eps_hi:
        raise ParameterError("build_curve needs eps_lo < eps_hi")
    if int(points) != points or points < 2:
        raise ParameterError(f"points must be an integer >= 2, got {points}")
    options = DEFAULT_OPTIONS if options is None else options
    grid = np.linspace(eps_lo, eps_hi, int(points))
    return curve_on_grid(params, grid, options)


def curve_on_grid(params, grid, options=None):
    options = DEFAULT_OPTIONS if options is None else options

    def func(eps, direction):
        return HockeyStickQuery(float(eps), params).evaluate(direction, options)
    return curve_from_function(func, grid, threads=options.threads)


def _grid_mesh(grid):
    if len(grid) < 2:
        raise GridRangeError("curve grid needs at least 2 points")
    mesh = (grid[-1] - grid[0])/(len(grid) - 1)
    if np.any(np.abs(np.diff(grid) - mesh) > 1.e-9*max(mesh, 1.0)):
        raise GridRangeError("curve grid must be uniform to be discretized")
    return mesh


def discretize_curve(curve, direction='forward'):
    """pessimistic discrete PLD whose implied curve matches curve at its grid

    The grid must be uniform and contain eps values on both sides of 0.
    Between neighbouring grid points the implied curve is linear in e^eps,
    so with slopes S_j = (delta_j - delta_{j+1})/(e^{l_{j+1}} - e^{l_j}) the
    masses are mass_j = e^{l_j}(S_{j-1} - S_j).  delta at the last grid point
    becomes inf_mass, the remainder goes to the first grid point.
    """
    if direction not in ('forward', 'backward'):
        raise ParameterError(f"direction must be 'forward' or 'backward', got '{direction}'")
    grid = curve.grid
    mesh = _grid_mesh(grid)
    if grid[0] > 0 or grid[-1] < 0:
        raise GridRangeError(f"curve grid [{grid[0]:g}, {grid[-1]:g}] must cover eps = 0 "
                             "from both sides")
    delta = getattr(curve, direction)
    expgrid = np.exp(grid)
    slopes = np.append((delta[:-1] - delta[1:])/np.diff(expgrid), 0.0)
    masses = np.empty(len(grid))
    masses[1:] = expgrid[1:]*(slopes[:-1] - slopes[1:])
    inf_mass = float(delta[-1])
    clipped = -masses[1:][masses[1:] < 0].sum()
    if clipped > 1.e-12:
        logger.warning("discretize_curve: clipped %.3g of negative mass", clipped)
    masses[1:] = np.maximum(masses[1:], 0.0)
    masses[0] = max(0.0, 1.0 - inf_mass - stable_sum(masses[1:]))
    masses = normalized_masses(masses, inf_mass)
    return DiscretePLD(origin=float(grid[0]), mesh=float(mesh), masses=masses,
                       inf_mass=inf_mass)


def exact_pld(params, mesh, direction='forward', rounding='connect-dots',
              max_n=EXACT_PLD_MAX_N):
    """discrete PLD by enumerating every outcome of the dominating pair

    Arguments
    ---------
    params     VariationRatioParams or AsymmetricParams, n_blanket <= max_n
    mesh       grid spacing; the grid holds integer multiples of mesh
    direction  'forward' for log(P/Q) under P, 'backward' for log(Q/P) under Q
    rounding   'connect-dots' splits each loss between its two neighbouring
               grid points, keeping both its P and Q mass; 'ceil' moves it to
               the next grid point up

    Returns
    -------
    DiscretePLD
    """
    if direction not in ('forward', 'backward'):
        raise ParameterError(f"direction must be 'forward' or 'backward', got '{direction}'")
    if rounding not in ('connect-dots', 'ceil'):
        raise ParameterError(f"rounding must be 'connect-dots' or 'ceil', got '{rounding}'")
    if not mesh > 0:
        raise ParameterError(f"mesh must be > 0, got {mesh}")
    max_n = min(max_n, BRUTE_FORCE_MAX_N)

    pmass, qmass = [], []
    for pm, qm in _enumerate_pmfs(params, max_n=max_n):
        pmass.append(pm)
        qmass.append(qm)
    pmass, qmass = np.concatenate(pmass), np.concatenate(qmass)
    if direction == 'backward':
        pmass, qmass = qmass, pmass

    live = pmass > 0
    inf_mass = stable_sum(pmass[live & (qmass <= 0)])
    finite = live & (qmass > 0)
    mass = pmass[finite]
    loss = np.log(mass) - np.log(qmass[finite])

    if rounding == 'ceil':
        index = np.ceil(loss/mesh).astype('int64')
        weights = {0: (index, mass)}
    else:
        low = np.floor(loss/mesh).astype('int64')
        frac = np.clip(loss - low*mesh, 0.0, mesh)
        upper = np.expm1(-frac)/math.expm1(-mesh)
        weights = {0: (low, mass*(1 - upper)), 1: (low + 1, mass*upper)}

    lo = min(int(idx.min()) for idx, _ in weights.values()) if mass.size else 0
    hi = max(int(idx.max()) for idx, _ in weights.values()) if mass.size else 0
    masses = np.zeros(hi - lo + 1)
    for idx, wts in weights.values():
        masses += np.bincount(idx - lo, weights=wts, minlength=hi - lo + 1)
    total = stable_sum(masses) + inf_mass
    logger.debug("exact_pld: %d outcomes, grid [%d, %d], total mass %.15g",
                 int(finite.sum()), lo, hi, total)
    masses = normalized_masses(masses, inf_mass)
    return DiscretePLD(origin=lo*mesh, mesh=mesh, masses=masses, inf_mass=inf_mass)
