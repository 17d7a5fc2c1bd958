import math

import numpy as np
import pytest

from vrshuffle.errors import ParameterError, GridRangeError
from vrshuffle.params import VariationRatioParams, catalog
from vrshuffle.divergence import delta_forward, delta_backward, brute_force_delta
from vrshuffle.accountant import (PrivacyCurve, DiscretePLD, build_curve, curve_on_grid,
                                  discretize_curve, exact_pld, aligned_grid, CompositionPlan,
                                  CompositionResult, compose, compose_pld, compose_params,
                                  compose_subsampled)
from vrshuffle.accountant.curves import normalized_masses
from vrshuffle.numerics import stable_sum


@pytest.fixture
def small_params():
    return catalog('krr', eps0=1.0, d=4, n=101)


@pytest.fixture
def small_pld(small_params):
    return exact_pld(small_params, 0.01)


def test_curve_validation():
    with pytest.raises(ParameterError):
        PrivacyCurve([0.0, 0.0, 1.0], [0, 0, 0], [0, 0, 0])
    with pytest.raises(ParameterError):
        PrivacyCurve([0.0, 1.0], [0.1], [0.1, 0.0])
    curve = PrivacyCurve([0.0, 0.5, 1.0], [0.2, 0.3, -0.1], [1.5, 0.1, 0.0])
    assert curve.forward.tolist() == [0.3, 0.3, 0.0]
    assert curve.backward.tolist() == [1.0, 0.1, 0.0]
    assert curve.deltas.tolist() == [1.0, 0.3, 0.0]
    assert curve.epsilon(0.3) == 0.5
    assert curve.epsilon(0.0) == 1.0
    assert curve.epsilon(-1.0) == math.inf
    assert curve.rows()[1] == (0.5, 0.3, 0.1)


def test_build_curve_nodes(small_params):
    curve = build_curve(small_params, -0.5, 1.0, 7)
    assert len(curve.grid) == 7
    for eps, fwd, bwd in curve.rows():
        assert fwd == pytest.approx(delta_forward(eps, small_params), abs=1e-15)
        assert bwd == pytest.approx(delta_backward(eps, small_params), abs=1e-15)
    with pytest.raises(ParameterError):
        build_curve(small_params, 1.0, 0.0, 5)
    with pytest.raises(ParameterError):
        build_curve(small_params, 0.0, 1.0, 1)


def test_zero_beta_curve():
    params = VariationRatioParams(3.0, 0.0, 2.0, n_blanket=10)
    curve = build_curve(params, -1.0, 1.0, 9)
    positive = curve.grid >= 0
    assert np.all(curve.forward[positive] == 0)
    assert np.all(curve.backward[positive] == 0)
    assert curve.forward[0] == pytest.approx(-math.expm1(-1.0))


def test_threads_give_same_curve(small_params):
    from vrshuffle.divergence import DivergenceOptions
    grid = aligned_grid(0.3, 0.05)
    one = curve_on_grid(small_params, grid)
    four = curve_on_grid(small_params, grid, DivergenceOptions(threads=4))
    assert np.array_equal(one.forward, four.forward)
    assert np.array_equal(one.backward, four.backward)


def test_aligned_grid():
    grid = aligned_grid(0.25, 0.1)
    assert len(grid) == 7
    assert grid[0] == pytest.approx(-0.3) and grid[-1] == pytest.approx(0.3)
    assert grid[3] == 0.0
    assert len(aligned_grid(0.2, 0.1)) == 5
    with pytest.raises(ParameterError):
        aligned_grid(1.0, 0.0)


def test_point_mass_curve():
    grid = aligned_grid(1.0, 0.1)
    vals = np.maximum(0.0, -np.expm1(grid))
    pld = discretize_curve(PrivacyCurve(grid, vals, vals))
    assert pld.inf_mass == 0.0
    center = int(np.argmin(np.abs(pld.losses)))
    assert pld.masses[center] == pytest.approx(1.0, abs=1e-12)
    assert pld.delta(0.0) == pytest.approx(0.0, abs=1e-12)
    assert pld.epsilon(1e-6) == 0.0


def test_discretize_round_trip(small_params):
    grid = aligned_grid(0.6, 0.02)
    curve = curve_on_grid(small_params, grid)
    for direction in ('forward', 'backward'):
        pld = discretize_curve(curve, direction)
        assert math.fsum(pld.masses) + pld.inf_mass == pytest.approx(1.0, abs=1e-12)
        assert pld.inf_mass == getattr(curve, direction)[-1]
        implied = pld.delta(grid)
        assert np.allclose(implied, getattr(curve, direction), atol=1e-9, rtol=0)


def test_discretize_needs_uniform_grid_around_zero():
    vals = np.array([0.5, 0.2, 0.1, 0.0])
    with pytest.raises(GridRangeError):
        discretize_curve(PrivacyCurve([0.1, 0.2, 0.3, 0.4], vals, vals))
    with pytest.raises(GridRangeError):
        discretize_curve(PrivacyCurve([-0.1, 0.0, 0.1, 0.5], vals, vals))
    with pytest.raises(GridRangeError):
        discretize_curve(PrivacyCurve([0.0], [0.0], [0.0]))
    grid = aligned_grid(0.2, 0.1)
    curve = PrivacyCurve(grid, np.zeros(5), np.zeros(5))
    with pytest.raises(ParameterError):
        discretize_curve(curve, 'sideways')


def test_exact_pld_spikes_only():
    params = VariationRatioParams(3.0, 0.4, 2.0)
    mesh = math.log(3.0)/4
    pld = exact_pld(params, mesh)
    assert pld.inf_mass == 0.0
    assert math.fsum(pld.masses) == pytest.approx(1.0, abs=1e-14)
    for k in range(-4, 5):
        eps = k*mesh
        assert pld.delta(eps) == pytest.approx(brute_force_delta(eps, params), abs=1e-12)


@pytest.mark.parametrize('direction', ['forward', 'backward'])
def test_exact_pld_matches_brute_force_on_grid(small_params, direction):
    mesh = 0.05
    pld = exact_pld(small_params, mesh, direction)
    for k in range(-20, 21, 3):
        eps = k*mesh
        expected = brute_force_delta(eps, small_params, direction)
        assert pld.delta(eps) == pytest.approx(expected, abs=1e-12)


def test_ceil_rounding_is_pessimistic(small_params):
    pld = exact_pld(small_params, 0.05, rounding='ceil')
    for eps in np.linspace(-0.5, 1.0, 11):
        assert pld.delta(eps) >= brute_force_delta(eps, small_params) - 1e-12


def test_exact_pld_errors(small_params):
    with pytest.raises(ParameterError):
        exact_pld(small_params, 0.0)
    with pytest.raises(ParameterError):
        exact_pld(small_params, 0.1, rounding='floor')
    with pytest.raises(ParameterError):
        exact_pld(small_params, 0.1, direction='both')


def test_exact_and_discretized_plds_agree():
    params = catalog('krr', eps0=1.0, d=4, n=501)
    mesh = 0.02
    grid = aligned_grid(1.0, mesh)
    from_curve = discretize_curve(curve_on_grid(params, grid))
    exact = exact_pld(params, mesh)
    inner = grid[grid < grid[-1]]
    assert np.allclose(from_curve.delta(inner), exact.delta(inner), atol=1e-9, rtol=0)


def test_pld_validation_and_epsilon():
    with pytest.raises(ParameterError):
        DiscretePLD(0.0, 0.1, [0.5, 0.4])
    with pytest.raises(ParameterError):
        DiscretePLD(0.0, 0.0, [1.0])
    with pytest.raises(ParameterError):
        DiscretePLD(0.0, 0.1, [1.1, -0.1])
    pld = DiscretePLD(-0.1, 0.1, [0.5, 0.3, 0.1], inf_mass=0.1)
    assert pld.max_loss == pytest.approx(0.1)
    assert pld.epsilon(0.05) == math.inf
    assert pld.delta(5.0) == pytest.approx(0.1)
    eps = pld.epsilon(0.105)
    assert 0 < eps < pld.max_loss
    assert pld.delta(eps) == pytest.approx(0.105, abs=1e-12)


def test_pld_mass_tolerance(small_pld):
    with pytest.raises(ParameterError):
        DiscretePLD(0.0, 0.1, [0.5, 0.5 + 1e-10])
    DiscretePLD(0.0, 0.1, [0.5, 0.5 - 1e-13])

    masses = normalized_masses([0.5, 0.5 + 1e-10], 0.0)
    assert stable_sum(masses) == pytest.approx(1.0, abs=1e-15)
    far = normalized_masses([0.5, 0.4], 0.0)
    assert far.tolist() == [0.5, 0.4]

    composed = compose_pld([small_pld], K=64)
    assert abs(stable_sum(composed.masses) + composed.inf_mass - 1) <= 1e-12


def test_plan_validation():
    for kws in (dict(K=0), dict(K=2.5), dict(eps_error=0.0), dict(delta_error=1.0),
                dict(gamma=0.0), dict(mesh=-1.0), dict(eps_upper=0.0), dict(points=1)):
        with pytest.raises(ParameterError):
            CompositionPlan(**kws)
    plan = CompositionPlan(K=4, eps_error=0.02, delta_error=1e-6)
    assert plan.default_mesh() == pytest.approx(0.02/math.sqrt(4*math.log(1e6)))
    assert CompositionPlan(mesh=0.3).resolved_mesh() == 0.3


def test_two_rounds_match_direct_convolution():
    params = catalog('krr', eps0=1.0, d=4, n=501)
    assert params.n_blanket == 500
    single = exact_pld(params, 0.01)
    pld = compose_pld([single, single], homogeneous=False)
    direct = np.convolve(single.masses, single.masses)
    assert np.allclose(pld.masses, direct, atol=1e-12, rtol=0)
    assert pld.inf_mass == pytest.approx(2*single.inf_mass - single.inf_mass**2, abs=1e-15)
    assert pld.origin == pytest.approx(2*single.origin)
    assert pld.mesh == single.mesh


def test_repeated_squaring_matches_generic(small_pld):
    fast = compose_pld([small_pld], homogeneous=True, K=8)
    slow = compose_pld([small_pld]*8, homogeneous=False)
    assert len(fast.masses) == len(slow.masses)
    assert np.allclose(fast.masses, slow.masses, atol=1e-12, rtol=0)
    for eps in (0.0, 0.5, 1.0, 2.0):
        assert fast.delta(eps) == pytest.approx(slow.delta(eps), abs=1e-12)


def test_inf_mass_composes():
    a = DiscretePLD(0.0, 0.1, [0.9], inf_mass=0.1)
    b = DiscretePLD(0.0, 0.1, [0.8], inf_mass=0.2)
    out = compose_pld([a, b])
    assert out.inf_mass == pytest.approx(0.1 + 0.2 - 0.02)
    assert out.masses[0] == pytest.approx(0.72)


def test_more_rounds_never_help(small_pld):
    two = compose_pld([small_pld], K=2)
    three = compose_pld([small_pld], K=3)
    for eps in np.linspace(0.0, 2.0, 9):
        assert three.delta(eps) >= two.delta(eps) - 1e-12


def test_incompatible_plds(small_pld):
    other_mesh = DiscretePLD(0.0, 0.02, [1.0])
    with pytest.raises(ParameterError):
        compose_pld([small_pld, other_mesh])
    shifted = DiscretePLD(small_pld.origin + 0.5*small_pld.mesh, small_pld.mesh,
                          small_pld.masses, small_pld.inf_mass)
    with pytest.raises(ParameterError):
        compose_pld([small_pld, shifted])
    with pytest.raises(ParameterError):
        compose_pld([])


def test_compose_curve(small_params, small_pld):
    plan = CompositionPlan(K=3, points=11)
    backward = exact_pld(small_params, 0.01, 'backward')
    curve = compose([small_pld], plan, backward_plds=[backward])
    composed = compose_pld([small_pld], K=3)
    assert len(curve.grid) == 11 and curve.grid[0] == 0.0
    assert np.allclose(curve.forward, composed.delta(curve.grid), atol=1e-15)
    assert curve.forward[-1] <= plan.delta_error + 1e-12


def test_single_round_composition(small_params):
    plan = CompositionPlan(K=1, points=21)
    result = compose_params([small_params], plan)
    assert isinstance(result, CompositionResult)
    for eps, fwd, _ in result.curve.rows():
        true = delta_forward(eps, small_params)
        # the grid curve is pessimistic between its nodes
        assert true - 1e-12 <= fwd <= true + 1e-4


def test_result_epsilon(small_params):
    result = compose_params([small_params], CompositionPlan(K=2))
    eps = result.epsilon(1e-6)
    assert eps == max(result.forward.epsilon(1e-6), result.backward.epsilon(1e-6))
    assert 0 < eps < 2*math.log(small_params.p)


def test_round_count_mismatch(small_params):
    with pytest.raises(ParameterError):
        compose_params([small_params]*3, CompositionPlan(K=2))
    with pytest.raises(ParameterError):
        compose_params([])


def test_heterogeneous_rounds():
    first = catalog('krr', eps0=1.0, d=4, n=101)
    second = catalog('krr', eps0=0.5, d=4, n=101)
    plan = CompositionPlan(mesh=0.01, eps_upper=1.0)
    mixed = compose_params([first, second], plan)
    same = compose_params([first, first], plan)
    assert mixed.epsilon(1e-6) <= same.epsilon(1e-6) + 1e-9


def test_subsampling_identity(small_params):
    plan = CompositionPlan(mesh=0.01, eps_upper=1.0, points=11)
    plain = compose_params([small_params], CompositionPlan(K=2, mesh=0.01, eps_upper=1.0,
                                                           points=11)).curve
    sampled = compose_subsampled(small_params, 1.0, 2, plan)
    assert np.array_equal(plain.grid, sampled.grid)
    assert np.array_equal(plain.forward, sampled.forward)


def test_subsampling_helps():
    params = catalog('krr', eps0=1.0, d=4, n=201)
    plan = CompositionPlan(K=4, mesh=0.01, eps_upper=1.0)
    plain = compose_params([params], plan)
    sampled = compose_params([params], CompositionPlan(K=4, mesh=0.01, eps_upper=1.0,
                                                       gamma=0.1))
    assert sampled.epsilon(1e-6) <= plain.epsilon(1e-6) + 1e-9
    assert np.array_equal(sampled.curve.forward, sampled.curve.backward)
