from .groebner import (
    DEFAULT_MAX_STEPS,
    BudgetExceeded,
    Ideal,
    elim_ideal,
    groebner,
    normal_form,
    saturate_decide,
)
from .linalg import DimensionError, det, nullspace, primitive, rank, rref, solve
from .poly import MPoly, format_rational, natural_key, sorted_vars, unify_all

__all__ = [
    "BudgetExceeded", "DEFAULT_MAX_STEPS", "DimensionError", "Ideal", "MPoly",
    "det", "elim_ideal", "format_rational", "groebner", "normal_form",
    "natural_key", "nullspace", "primitive", "rank", "rref", "saturate_decide",
    "solve", "sorted_vars",
    "unify_all",
]
