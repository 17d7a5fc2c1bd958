#!/usr/bin/env python
try:
    from .version import __version__, __version_tuple__
except ImportError:
    __version__ = '0.0.0+unknown'
    __version_tuple__ = (0, 0, 0, 'unknown')

from .errors import (VRShuffleException, ParameterError, UnboundedRatioError,
                     UnsupportedRegimeError, SizeLimitError, GridRangeError,
                     OutputError)
from .params import (VariationRatioParams, AsymmetricParams, MechanismSpec,
                     catalog, catalog_ids, with_users)
from .divergence import (DivergenceOptions, HockeyStickQuery, delta_forward,
                         delta_backward, delta_asymmetric, brute_force_delta,
                         subsample_delta)
from .bounds import (BoundRequest, BoundResult, upper_bound, lower_bound,
                     oracle_bound, analytic_bound, asymptotic_bound)
from .accountant import (PrivacyCurve, DiscretePLD, CompositionPlan, compose,
                         compose_params, compose_subsampled)
from .apps import run_vr
