from .types import (VariationRatioParams, AsymmetricParams, MechanismSpec,
                    with_users, beta_limit, DEGENERATE_P)
from .catalog import CATALOG, catalog, catalog_ids
from .derive import (derive_variation_ratio, derive_lower_params,
                     parallel_compose, hierarchical_params)
