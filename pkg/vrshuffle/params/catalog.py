#!/usr/bin/env python
"""
Catalog of amplification parameters for published local randomizers
and multi-message shuffle protocols.

Each row maps its arguments to (p, beta, q).  Rows flagged as
multi-message take the number of messages per user into account when
computing the number of blanket messages.
"""
import math
from dataclasses import dataclass

from ..errors import ParameterError, UnboundedRatioError
from .types import VariationRatioParams, DEGENERATE_P, with_users


@dataclass(frozen=True)
class CatalogRow:
    name: str
    func: object
    args: tuple
    multi_message: bool = False
    description: str = ''


def _comb(n, k):
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def _require(cond, row, msg):
    if not cond:
        raise ParameterError(f"{row}: {msg}")


def _check_eps(row, name, eps):
    _require(eps > 0 and math.isfinite(eps), row, f"{name} must be finite and > 0, got {eps}")


def _check_int(row, name, val, low, high=None):
    ok = int(val) == val and val >= low and (high is None or val <= high)
    hi_txt = '' if high is None else f' and <= {high}'
    _require(ok, row, f"{name} must be an integer >= {low}{hi_txt}, got {val}")
    return int(val)


def _ldp(row, eps0):
    _check_eps(row, 'eps0', eps0)
    return math.exp(eps0)


# eps-LDP randomizers with p = q = e^eps0

def general_ldp(eps0):
    e = _ldp('general-ldp', eps0)
    return e, math.tanh(eps0/2), e

def laplace_unit(eps0):
    e = _ldp('laplace-unit', eps0)
    return e, -math.expm1(-eps0/2), e

def piecewise(eps0):
    e = _ldp('piecewise', eps0)
    return e, -math.expm1(-eps0/2), e

def rr2(eps0):
    e = _ldp('rr2', eps0)
    return e, math.tanh(eps0/2), e

def krr(eps0, d):
    e = _ldp('krr', eps0)
    _require(d >= 2, 'krr', f"d must be >= 2, got {d}")
    return e, math.expm1(eps0)/(e + d - 1), e

def rappor(eps0, d):
    e = _ldp('rappor', eps0)
    _check_int('rappor', 'd', d, 1)
    return e, math.tanh(eps0/4), e

def k_subset(eps0, d, k):
    e = _ldp('k-subset', eps0)
    d = _check_int('k-subset', 'd', d, 2)
    k = _check_int('k-subset', 'k', k, 1, d - 1)
    num = math.expm1(eps0)*(_comb(d - 1, k - 1) - _comb(d - 2, k - 2))
    return e, num/(e*_comb(d - 1, k - 1) + _comb(d - 1, k)), e

def local_hash(eps0, l):
    e = _ldp('local-hash', eps0)
    _require(l >= 2, 'local-hash', f"l must be >= 2, got {l}")
    return e, math.expm1(eps0)/(e + l - 1), e

def hadamard(eps0, K, s):
    e = _ldp('hadamard', eps0)
    K = _check_int('hadamard', 'K', K, 1)
    s = _check_int('hadamard', 's', s, 1, K)
    return e, s*math.expm1(eps0)/2/(s*e + K - s), e

def hadamard_b(eps0, K, s):
    e = _ldp('hadamard-B', eps0)
    K = _check_int('hadamard-B', 'K', K, 1)
    s = _check_int('hadamard-B', 's', s, 1, K)
    return e, s*math.expm1(eps0)/(s*e + K - s), e

def sampling_rappor(eps0, d, s):
    e = _ldp('sampling-rappor', eps0)
    d = _check_int('sampling-rappor', 'd', d, 1)
    s = _check_int('sampling-rappor', 's', s, 1, d)
    return e, s*math.tanh(eps0/4)/d, e

def pckv_grr(eps0, d, s):
    e = _ldp('pckv-grr', eps0)
    d = _check_int('pckv-grr', 'd', d, 1)
    _require(s > 0, 'pckv-grr', f"s must be > 0, got {s}")
    return e, s*math.expm1(eps0)/(s*e + 2*d - s), e

def wheel(eps0, d, s, length):
    e = _ldp('wheel', eps0)
    _check_int('wheel', 'd', d, 1)
    sp = s*length
    _require(0 < sp <= 1, 'wheel', f"s*length must be in (0, 1], got {sp}")
    return e, sp*math.expm1(eps0)/(sp*e + 1 - sp), e

def subset_exp(eps0, d, s, k):
    e = _ldp('subset-exp', eps0)
    d = _check_int('subset-exp', 'd', d, 2)
    s = _check_int('subset-exp', 's', s, 1, d - 1)
    k = _check_int('subset-exp', 'k', k, 1, d - s)
    num = math.expm1(eps0)*(_comb(d - s, k) - _comb(d - 2*s, k))
    den = e*(_comb(d, k) - _comb(d - s, k)) + _comb(d - s, k)
    return e, num/den, e

def collision(eps0, s, l):
    e = _ldp('collision', eps0)
    l = _check_int('collision', 'l', l, 2)
    s = _check_int('collision', 's', s, 1, l - 1)
    return e, min(s, l - s)*math.expm1(eps0)/(s*e + l - s), e

def privkv(d, s, eps1, eps2):
    _check_eps('privkv', 'eps1', eps1)
    _check_eps('privkv', 'eps2', eps2)
    d = _check_int('privkv', 'd', d, 1)
    s = _check_int('privkv', 's', s, 1, d)
    e1, e2 = math.exp(eps1), math.exp(eps2)
    t2 = math.tanh(eps2/2)
    best = max(e1*t2, e1 - 1 + t2/2)
    e = math.exp(eps1 + eps2)
    return e, 2*s*best/(d*(e1 + 1)), e

def duchi(eps0):
    e = _ldp('duchi', eps0)
    return e, math.tanh(eps0/2), e

def harmony(eps0):
    e = _ldp('harmony', eps0)
    return e, math.tanh(eps0/2), e


# metric (d_X) LDP randomizers, p = e^d01, q = e^dmax

def _metric(row, d01, dmax):
    _require(d01 >= 0 and math.isfinite(d01), row, f"d01 must be finite and >= 0, got {d01}")
    _require(dmax >= d01 and math.isfinite(dmax), row,
             f"dmax must be finite and >= d01, got {dmax}")
    return math.exp(d01), math.exp(dmax)

def metric_general(d01, dmax):
    p, q = _metric('metric-general', d01, dmax)
    return p, math.tanh(d01/2), q

def metric_laplace(d01, dmax):
    p, q = _metric('metric-laplace', d01, dmax)
    return p, -math.expm1(-d01/2), q

def metric_planar_laplace(d01, dmax):
    from ..numerics import planar_laplace_tv
    p, q = _metric('metric-planar-laplace', d01, dmax)
    return p, planar_laplace_tv(d01), q

def witchhat(B, m, F, d01, dmax):
    p, q = _metric('witchhat', d01, dmax)
    _require(B > 0, 'witchhat', f"B must be > 0, got {B}")
    _require(F > 0, 'witchhat', f"F must be > 0, got {F}")
    _require(m > 0 and d01/F <= m, 'witchhat', f"m must be > 0 and >= d01/F, got {m}")
    x = d01/F
    num = 2*(math.exp(m) - math.exp(x) + x - m)
    return p, num/(F*math.expm1(m) + 2*B), q


# multi-message protocols

def balcer_coin(coin):
    _require(0 < coin < 1, 'balcer-coin', f"coin must be in (0, 1), got {coin}")
    return math.inf, 1.0, max(1/coin, 1/(1 - coin))

def balcer_uniform():
    return math.inf, 1.0, 2.0

def cheu(f, d):
    _check_int('cheu', 'd', d, 1)
    if f == 0:
        raise UnboundedRatioError("cheu: f = 0 gives unbounded p and q")
    _require(0 < f <= 0.5, 'cheu', f"f must satisfy 0 < f <= 0.5, got {f}")
    return (1 - f)**2/f**2, 1 - 2*f, (1 - f)/f

def balls_into_bins(d, s):
    d = _check_int('balls-into-bins', 'd', d, 1)
    s = _check_int('balls-into-bins', 's', s, 1, d)
    return math.inf, 1.0, d/s

def mixdump(f, d):
    d = _check_int('mixdump', 'd', d, 2)
    if f == 0:
        raise UnboundedRatioError("mixdump: f = 0 gives unbounded p")
    _require(0 < f <= (d - 1)/d, 'mixdump', f"f must satisfy 0 < f <= (d-1)/d, got {f}")
    return (1 - f)*(d - 1)/f, ((1 - f)*(d - 1) - f)/(d - 1), (1 - f)*d


def hierarchical_krr(eps0, d, H):
    from .derive import hierarchical_params
    par = hierarchical_params(eps0, d, H)
    return par.p, par.beta, par.q


_ROWS = (
    CatalogRow('general-ldp', general_ldp, ('eps0',), description='any eps0-LDP randomizer'),
    CatalogRow('laplace-unit', laplace_unit, ('eps0',), description='Laplace on [0,1]'),
    CatalogRow('piecewise', piecewise, ('eps0',), description='piecewise mechanism'),
    CatalogRow('rr2', rr2, ('eps0',), description='randomized response on 2 options'),
    CatalogRow('krr', krr, ('eps0', 'd'), description='k-randomized response'),
    CatalogRow('rappor', rappor, ('eps0', 'd'), description='RAPPOR / unary encoding'),
    CatalogRow('k-subset', k_subset, ('eps0', 'd', 'k'), description='k-subset'),
    CatalogRow('local-hash', local_hash, ('eps0', 'l'), description='local hashing, l buckets'),
    CatalogRow('hadamard', hadamard, ('eps0', 'K', 's'), description='Hadamard response, B=1'),
    CatalogRow('hadamard-B', hadamard_b, ('eps0', 'K', 's'), description='Hadamard response, B>1'),
    CatalogRow('sampling-rappor', sampling_rappor, ('eps0', 'd', 's'),
               description='sampling RAPPOR'),
    CatalogRow('pckv-grr', pckv_grr, ('eps0', 'd', 's'), description='PCKV-GRR'),
    CatalogRow('wheel', wheel, ('eps0', 'd', 's', 'length'), description='wheel mechanism'),
    CatalogRow('subset-exp', subset_exp, ('eps0', 'd', 's', 'k'),
               description='subset exponential mechanism'),
    CatalogRow('collision', collision, ('eps0', 's', 'l'), description='collision mechanism'),
    CatalogRow('privkv', privkv, ('d', 's', 'eps1', 'eps2'),
               description='PrivKV, eps = eps1 + eps2'),
    CatalogRow('duchi', duchi, ('eps0',), description='Duchi et al. mean estimation'),
    CatalogRow('harmony', harmony, ('eps0',), description='Harmony'),
    CatalogRow('metric-general', metric_general, ('d01', 'dmax'),
               description='any metric-LDP randomizer'),
    CatalogRow('metric-laplace', metric_laplace, ('d01', 'dmax'),
               description='Laplace, metric LDP'),
    CatalogRow('metric-planar-laplace', metric_planar_laplace, ('d01', 'dmax'),
               description='planar Laplace'),
    CatalogRow('witchhat', witchhat, ('B', 'm', 'F', 'd01', 'dmax'),
               description='witch-hat mechanism'),
    CatalogRow('balcer-coin', balcer_coin, ('coin',), multi_message=True,
               description='Balcer et al., coin probability'),
    CatalogRow('balcer-uniform', balcer_uniform, (), multi_message=True,
               description='Balcer et al., uniform coin'),
    CatalogRow('cheu', cheu, ('f', 'd'), multi_message=True,
               description='Cheu et al. multi-message protocol'),
    CatalogRow('balls-into-bins', balls_into_bins, ('d', 's'), multi_message=True,
               description='balls into bins'),
    CatalogRow('mixdump', mixdump, ('f', 'd'), multi_message=True,
               description='mix-dump protocol'),
    CatalogRow('hierarchical-krr', hierarchical_krr, ('eps0', 'd', 'H'),
               description='hierarchical range queries with krr levels'),
)

CATALOG = {row.name: row for row in _ROWS}


def catalog_ids():
    return list(CATALOG.keys())


def catalog(mechanism, n=None, messages=None, **kws):
    """look up the amplification parameters for a catalog row

    Arguments
    ---------
    mechanism  catalog id, see catalog_ids()
    n          number of users (optional); sets n_blanket
    messages   messages per user, multi-message rows only
    kws        row arguments, for example eps0=1.0, d=16

    Returns
    -------
    VariationRatioParams
    """
    row = CATALOG.get(mechanism, None)
    if row is None:
        raise ParameterError(f"unknown mechanism '{mechanism}'")
    missing = [a for a in row.args if kws.get(a, None) is None]
    if missing:
        raise ParameterError(f"{mechanism}: missing argument(s) {', '.join(missing)}")
    extra = [a for a, v in kws.items() if a not in row.args and v is not None]
    if extra:
        raise ParameterError(f"{mechanism}: unexpected argument(s) {', '.join(extra)}")
    if messages is not None and not row.multi_message:
        raise ParameterError(f"{mechanism}: messages only applies to multi-message protocols")

    p, beta, q = row.func(**{a: kws[a] for a in row.args})
    if p <= 1:
        params = VariationRatioParams(DEGENERATE_P, 0.0, max(1.0, q), degenerate=True)
    else:
        params = VariationRatioParams(p, beta, q)
    if n is not None:
        params = with_users(params, n, messages=messages)
    return params
