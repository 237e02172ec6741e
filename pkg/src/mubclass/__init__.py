"""Classification of subsets of mutually unbiased bases with finite operations."""

__version__ = "0.1.0"

from .bounds import complexity_estimates, emit_complexity_curves, theorem1_bound
from .entropy_lb import (EntropyConfig, StateParams, entropy_partition, entropy_sum,
                         min_entropy, state_from_params)
from .index_maps import conj_index_map, mod_inverse, unitary_index_map, vector_index_map
from .mub_core import (Dimension, DimensionError, MubFamily, build_family, build_prime_mubs,
                       build_prime_power_mubs, check_unbiased, match_vector)
from .orbits import (OrbitPartition, ResourceGuardError, apply_generator, classify_all,
                     orbit_closure, permutation_group)
from .prime_power import classify_prime_power, discover_permutations
from .transform_table import (ClosureViolation, TransformTable, build_table_analytic,
                              build_table_numeric)
