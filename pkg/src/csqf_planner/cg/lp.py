"""LP engine contract: maximize c·x s.t. A x <= b, x >= 0, returning vertex duals.

Backed by the HiGHS dual simplex shipped with scipy. Interior-point without crossover is not
acceptable here because pricing relies on basic (vertex) dual values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog


class LPError(RuntimeError):
    pass


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    duals: np.ndarray  # one non-negative value per row of A


def solve_lp(c: np.ndarray, A: sparse.spmatrix, b: np.ndarray, context: str = "") -> LPResult:
    c = np.asarray(c, dtype=float)
    b = np.asarray(b, dtype=float)
    if c.size == 0:
        return LPResult(np.zeros(0), 0.0, np.zeros(b.size))
    res = linprog(-c, A_ub=A, b_ub=b, bounds=(0, None), method="highs-ds")
    if res.status != 0:
        raise LPError(f"LP solve failed ({context}): status={res.status} {res.message}")
    duals = np.maximum(-np.asarray(res.ineqlin.marginals, dtype=float), 0.0)
    return LPResult(np.asarray(res.x, dtype=float), float(-res.fun), duals)
