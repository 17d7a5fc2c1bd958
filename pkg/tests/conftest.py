import json
import math

import numpy as np
import pytest

from vrshuffle.params import VariationRatioParams, AsymmetricParams, catalog, beta_limit

# p values covered by the engine cross-checks
P_VALUES = (1.5, math.e, math.e**3, 1.e9, math.inf)


def ldp_params(eps0, n):
    """general eps0-LDP randomizer with n users"""
    return catalog('general-ldp', eps0=eps0, n=n)


def random_symmetric(rng, p, n_max=200):
    """random VariationRatioParams with r < 1/2 for the given p"""
    beta = beta_limit(p)*rng.uniform(0.05, 1.0)
    q = rng.uniform(2.5, 6.0)
    n_blanket = int(rng.integers(1, n_max + 1))
    return VariationRatioParams(p, beta, q, n_blanket=n_blanket)


def random_asymmetric(rng, p, n_max=200):
    """random AsymmetricParams with q0/q1 in [1/p, p] and r0 + r1 < 1"""
    beta = beta_limit(p)*rng.uniform(0.05, 1.0)
    q0 = rng.uniform(5.0, 6.0)
    lo, hi = max(1/p, 0.5), min(p, 2.0)
    q1 = q0*rng.uniform(lo, hi)
    n_blanket = int(rng.integers(1, n_max + 1))
    return AsymmetricParams(p, beta, q0, q1, n_blanket=n_blanket)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def rr_matrix_file(tmp_path):
    """binary randomized response, p = 2"""
    fname = tmp_path / 'rr.json'
    fname.write_text(json.dumps({'rows': [[2/3, 1/3], [1/3, 2/3]]}))
    return fname.as_posix()


@pytest.fixture
def no_user_config(tmp_path, monkeypatch):
    """keep the CLI away from any real user configuration file"""
    monkeypatch.setenv('VRSHUFFLE_CONFIG', (tmp_path / 'missing.yaml').as_posix())
    return tmp_path
