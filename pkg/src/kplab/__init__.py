"""Exact computational laboratory for point/k-flat incidence combinatorics
over prime fields: configuration generators, incidence and simplex counters
with independent brute-force oracles, the (n,k) maximal operator, and exact
rational exponent bookkeeping.
"""

from .config import (
    Configuration,
    gen_degenerate,
    gen_nk_set,
    gen_point_cloud,
    gen_random_config,
    gen_random_direction_separated,
)
from .exponents import BoundExpr, PowerProduct
from .field import Field, FieldElement
from .flats import (
    AffineFlat,
    LinearSubspace,
    affine_hull,
    enumerate_grassmannian,
    enumerate_points,
    gaussian_binomial,
    intersect_flats,
    make_flat,
)
from .incidence import (
    build_refinement_chain,
    check_main_bound,
    check_max_ic,
    cs_holder_count,
    hypothesis_check,
    incidence_count,
    jr_decompose,
    refine_dyadic,
)
from .maximal import GridFunction, apply_maximal, empirical_norm_search
from .simplex import count_simplices, count_simplices_bruteforce, simplex_bound_report

__version__ = "0.1.0"

__all__ = [
    "AffineFlat",
    "BoundExpr",
    "Configuration",
    "Field",
    "FieldElement",
    "GridFunction",
    "LinearSubspace",
    "PowerProduct",
    "affine_hull",
    "apply_maximal",
    "build_refinement_chain",
    "check_main_bound",
    "check_max_ic",
    "count_simplices",
    "count_simplices_bruteforce",
    "cs_holder_count",
    "empirical_norm_search",
    "enumerate_grassmannian",
    "enumerate_points",
    "gaussian_binomial",
    "gen_degenerate",
    "gen_nk_set",
    "gen_point_cloud",
    "gen_random_config",
    "gen_random_direction_separated",
    "hypothesis_check",
    "incidence_count",
    "intersect_flats",
    "jr_decompose",
    "make_flat",
    "refine_dyadic",
    "simplex_bound_report",
]
