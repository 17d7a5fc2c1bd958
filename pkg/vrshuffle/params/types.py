#!/usr/bin/env python
"""
Parameter types for the variation-ratio reduction.

A local randomizer is summarized by

  p      bound on the probability ratio between the outputs of two inputs
  beta   bound on the total variation between the outputs of two inputs
  q      bound on the ratio between any input's output probability and
         the output probability of another user's randomizer

together with the number of blanket messages contributed by the other
users (n - 1 for single-message protocols).  p may be +inf.
"""
import json
import math
from pathlib import Path
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ..errors import ParameterError, OutputError

INF = math.inf
TOL = 1.e-12
DEGENERATE_P = 1.0 + 1.e-12


def beta_limit(p):
    """largest total variation allowed for a (log p)-LDP pair: (p-1)/(p+1)"""
    if math.isinf(p):
        return 1.0
    return (p - 1.0)/(p + 1.0)


def _check_count(name, value):
    if int(value) != value or value < 0:
        raise ParameterError(f"{name} must be a non-negative integer, got {value}")
    return int(value)


class _SpikeWeights:
    """weights of the (Delta1, Delta2) spikes shared by both parameter types

    (1, 0) has probability p_alpha, (0, 1) has probability alpha and
    (0, 0) has probability null_weight.  With p = +inf, alpha = 0 and
    p_alpha = beta.
    """

    @property
    def finite(self):
        return math.isfinite(self.p)

    @property
    def inv_p(self):
        return 0.0 if math.isinf(self.p) else 1.0/self.p

    @property
    def alpha(self):
        return 0.0 if math.isinf(self.p) else self.beta/(self.p - 1.0)

    @property
    def p_alpha(self):
        return self.beta if math.isinf(self.p) else self.beta*self.p/(self.p - 1.0)

    @property
    def null_weight(self):
        return max(0.0, 1.0 - self.alpha - self.p_alpha)

    @property
    def eps0(self):
        """local budget log(p)"""
        return math.log(self.p)

    @property
    def n_users(self):
        return self.n_blanket + 1

    def _check_p_beta(self):
        p, beta = float(self.p), float(self.beta)
        object.__setattr__(self, 'p', p)
        object.__setattr__(self, 'beta', beta)
        object.__setattr__(self, 'n_blanket', _check_count('n_blanket', self.n_blanket))
        if not p > 1:
            raise ParameterError(f"ratio bound p must be > 1, got {p}")
        if not 0 <= beta <= 1:
            raise ParameterError(f"total variation beta must be in [0, 1], got {beta}")
        if beta > beta_limit(p)*(1 + TOL) + TOL:
            raise ParameterError(f"beta={beta:.10g} exceeds (p-1)/(p+1)={beta_limit(p):.10g}")


@dataclass(frozen=True)
class VariationRatioParams(_SpikeWeights):
    """symmetric amplification parameters (p, beta, q)

    Derived values: alpha = beta/(p-1), r = alpha*p/q.  r <= 1/2 always;
    r = 1/2 is a valid parameter set that only the brute-force engine
    can evaluate.
    """
    p: float
    beta: float
    q: float
    n_blanket: int = 0
    degenerate: bool = False

    def __post_init__(self):
        self._check_p_beta()
        q = float(self.q)
        object.__setattr__(self, 'q', q)
        if not (q >= 1 and math.isfinite(q)):
            raise ParameterError(f"blanket ratio bound q must be finite and >= 1, got {q}")
        if self.r > 0.5 + TOL:
            raise ParameterError(f"r = alpha*p/q = {self.r:.10g} exceeds 1/2")

    @property
    def r(self):
        return self.p_alpha/self.q

    def with_blanket(self, n_blanket):
        return replace(self, n_blanket=n_blanket)

    def asymmetric(self):
        """the same parameters as AsymmetricParams with q0 = q1 = q"""
        return AsymmetricParams(p=self.p, beta=self.beta, q0=self.q, q1=self.q,
                                n_blanket=self.n_blanket, degenerate=self.degenerate)


@dataclass(frozen=True)
class AsymmetricParams(_SpikeWeights):
    """lower-bound parameters (p, beta, q0, q1)

    q0 and q1 are the expected blanket ratios on the two halves of the
    output space; r0 = alpha*p/q0 and r1 = alpha*p/q1.
    """
    p: float
    beta: float
    q0: float
    q1: float
    n_blanket: int = 0
    degenerate: bool = False

    def __post_init__(self):
        self._check_p_beta()
        q0, q1 = float(self.q0), float(self.q1)
        object.__setattr__(self, 'q0', q0)
        object.__setattr__(self, 'q1', q1)
        for name, q in (('q0', q0), ('q1', q1)):
            if not (q >= 1 and math.isfinite(q)):
                raise ParameterError(f"{name} must be finite and >= 1, got {q}")
        ratio = q0/q1
        if ratio*self.p < 1 - TOL or ratio > self.p*(1 + TOL):
            raise ParameterError(f"q0/q1 = {ratio:.10g} must lie in [1/p, p]")
        if self.r0 + self.r1 > 1 + TOL:
            raise ParameterError(f"r0 + r1 = {self.r0 + self.r1:.10g} exceeds 1")

    @property
    def r0(self):
        return self.p_alpha/self.q0

    @property
    def r1(self):
        return self.p_alpha/self.q1

    def with_blanket(self, n_blanket):
        return replace(self, n_blanket=n_blanket)


def with_users(params, n_users, messages=None):
    """set n_blanket from the number of users

    single-message protocols: n_blanket = n_users - 1
    m messages per user:      n_blanket = n_users*(m - 1)
    """
    n_users = _check_count('n_users', n_users)
    if n_users < 1:
        raise ParameterError("number of users must be >= 1")
    if messages is None:
        return params.with_blanket(n_users - 1)
    messages = _check_count('messages', messages)
    if messages < 1:
        raise ParameterError("messages per user must be >= 1")
    return params.with_blanket(n_users*(messages - 1))


@dataclass(frozen=True, eq=False)
class MechanismSpec:
    """explicit local randomizer: rows are inputs, columns are outputs

    blanket_rows, when given, are the output distributions of the other
    users' randomizers; by default the rows of matrix are used.
    """
    matrix: np.ndarray
    blanket_rows: Optional[np.ndarray] = None

    def __post_init__(self):
        matrix = self._check_rows('matrix', self.matrix)
        object.__setattr__(self, 'matrix', matrix)
        if self.blanket_rows is not None:
            blanket = self._check_rows('blanket_rows', self.blanket_rows)
            if blanket.shape[1] != matrix.shape[1]:
                raise ParameterError("blanket_rows and matrix must have the same number of outputs")
            object.__setattr__(self, 'blanket_rows', blanket)

    @staticmethod
    def _check_rows(name, rows):
        rows = np.atleast_2d(np.asarray(rows, dtype='float64'))
        if rows.ndim != 2 or rows.size == 0:
            raise ParameterError(f"{name} must be a non-empty 2-D array")
        if np.any(~np.isfinite(rows)) or np.any(rows < 0):
            raise ParameterError(f"{name} entries must be finite and >= 0")
        sums = rows.sum(axis=1)
        if np.any(np.abs(sums - 1) > 1.e-12):
            bad = int(np.argmax(np.abs(sums - 1)))
            raise ParameterError(f"{name} row {bad} sums to {sums[bad]:.15g}, not 1")
        return rows

    @property
    def blankets(self):
        return self.matrix if self.blanket_rows is None else self.blanket_rows

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or 'rows' not in data:
            raise ParameterError("mechanism description needs a 'rows' entry")
        return cls(matrix=data['rows'], blanket_rows=data.get('blanket_rows', None))

    @classmethod
    def from_file(cls, fname):
        """read {"rows": [[...], ...], "blanket_rows": [[...], ...]} from a JSON file"""
        fpath = Path(fname)
        try:
            with open(fpath, 'r') as fh:
                data = json.load(fh)
        except OSError as exc:
            raise OutputError(f"cannot read matrix file '{fname}': {exc.strerror}")
        except ValueError as exc:
            raise ParameterError(f"matrix file '{fname}' is not valid JSON: {exc}")
        return cls.from_dict(data)
