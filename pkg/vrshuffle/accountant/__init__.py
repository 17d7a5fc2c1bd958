from .curves import (PrivacyCurve, DiscretePLD, build_curve, curve_on_grid,
                     discretize_curve, exact_pld, aligned_grid)
from .compose import (CompositionPlan, CompositionResult, compose, compose_pld,
                      compose_params, compose_subsampled)
