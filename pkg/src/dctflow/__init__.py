"""Signal-flowgraph factorizations of DCT-II/III/IV with exact operation counting."""

from .complexity import (
    REGISTRY,
    BaseCounts,
    decompose,
    dyadic_family_scaled,
    fig5_csv,
    fig5_data,
    kok_counts,
    matches_pfa,
    pfa_scaled_bound,
    pfa_unscaled_lower_bound,
    savings,
    scaled_counts,
    table2,
    table2_csv,
    three_family_scaled,
)
from .estimators import Dct2, Dct3, ScaledDct2
from .factorizer import (
    BaseLibrary,
    ScaledFactorization,
    dct3_plan,
    dct3_plan_via_scaled,
    dense_base_plan,
    identity_plan,
    kok_plan,
    merged_scaled_plan,
    scaled_plan,
)
from .flowgraph import (
    ExactConstant,
    OpCount,
    PlanBuilder,
    PlanGraph,
    count_ops,
    load_plan,
    plan_from_dict,
    plan_to_dict,
    save_plan,
    to_dot,
    transpose,
)
from .folding import fold
from .oracle import (
    b_matrix,
    d_matrix,
    dct2_matrix,
    dct3_matrix,
    dct4_matrix,
    j_matrix,
    p_matrix,
    r_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "BaseCounts",
    "BaseLibrary",
    "Dct2",
    "Dct3",
    "ExactConstant",
    "OpCount",
    "PlanBuilder",
    "PlanGraph",
    "REGISTRY",
    "ScaledDct2",
    "ScaledFactorization",
    "b_matrix",
    "count_ops",
    "d_matrix",
    "dct2_matrix",
    "dct3_matrix",
    "dct4_matrix",
    "dct3_plan",
    "dct3_plan_via_scaled",
    "decompose",
    "dense_base_plan",
    "dyadic_family_scaled",
    "fig5_csv",
    "fig5_data",
    "fold",
    "identity_plan",
    "j_matrix",
    "kok_counts",
    "kok_plan",
    "load_plan",
    "matches_pfa",
    "merged_scaled_plan",
    "p_matrix",
    "pfa_scaled_bound",
    "pfa_unscaled_lower_bound",
    "plan_from_dict",
    "plan_to_dict",
    "r_matrix",
    "save_plan",
    "savings",
    "scaled_counts",
    "scaled_plan",
    "table2",
    "table2_csv",
    "three_family_scaled",
    "to_dot",
    "transpose",
    "__version__",
]
