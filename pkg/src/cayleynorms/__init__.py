"""Operator norms of averaging operators on Cayley graphs.

Truncated lower estimates of ``||lambda_S||_{p->p}``, Busemann-cocycle upper
bounds, horosphere statistics and combinatorial expansion for spheres,
balls and annuli in finitely presented groups given by rewriting systems.
"""

from .cayley import (
    AnnulusView,
    BallIndex,
    BallView,
    BoundaryWarning,
    GrowthStats,
    MedianResult,
    SphereView,
    ball_size_bound,
    distance,
    enumerate_ball,
    growth_stats,
    rough_median,
    rough_segment_count,
)
from .cocycle import (
    BoundReport,
    CocycleTable,
    busemann,
    case_bound,
    cocycle_table,
    cocycle_upper_bound,
    horosphere_counts,
    kappa_norm,
    optimize_epsilon,
    poly_exp_sum,
    standard_epsilon,
)
from .errors import CayleyNormsError, InputError, NumericalError, RecipeError, ResourceError
from .expansion import (
    ExpansionReport,
    best_lower_bound,
    expansion_exact,
    expansion_lower_bound,
    expansion_report,
    expansion_witnesses,
    product_set,
)
from .group import (
    Element,
    GeneratorAlphabet,
    RewritingSystem,
    check_local_confluence,
    free_abelian,
    free_group,
    free_product,
    group_from_spec,
    inverse,
    load_group,
    multiply,
    normal_form,
)
from .operator import (
    NormEstimate,
    SupportedFunction,
    TruncatedOperator,
    averaging_norm,
    build_truncated,
    build_truncated_right,
    conjugate_exponent,
    duality_check,
    norm2_estimate,
    normp_estimate,
    radial_norm_report,
    richardson_extrapolate,
    star,
)
from .recipes import RECIPES, RunConfig, Table, run_recipe

__version__ = "0.1.0"
