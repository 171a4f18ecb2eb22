from .lp import LPError, LPResult, solve_lp
from .master import CapacityRows, Column, MasterSolution, solve_restricted_master, strengthened_coefficients
from .pricing import DualValues, arc_weight, arc_weights, enumerate_spaths, price_demand, walk
from .rounding import RoundingResult, randomized_rounding, round_once
from .solver import DEFAULT_RR_RUNS, CGResult, CGRRResult, column_generation, solve_cg_rr

__all__ = [
    "DEFAULT_RR_RUNS",
    "CGResult",
    "CGRRResult",
    "CapacityRows",
    "Column",
    "DualValues",
    "LPError",
    "LPResult",
    "MasterSolution",
    "arc_weight",
    "arc_weights",
    "column_generation",
    "enumerate_spaths",
    "price_demand",
    "randomized_rounding",
    "round_once",
    "solve_cg_rr",
    "solve_lp",
    "solve_restricted_master",
    "strengthened_coefficients",
    "walk",
]
