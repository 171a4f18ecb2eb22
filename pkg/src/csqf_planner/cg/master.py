"""Restricted master LP over generated s-path columns."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy import sparse

from ..model import Instance, SPath, path_profile
from .lp import solve_lp
from .pricing import DualValues


@dataclass(frozen=True)
class Column:
    path: SPath
    demand_index: int
    value: float
    arcs: tuple[int, ...]
    loads: tuple[np.ndarray, ...]  # per arc on the path, length-C load vector

    @classmethod
    def build(cls, instance: Instance, path: SPath, value: Optional[float] = None) -> "Column":
        d = instance.demand(path.demand)
        prof = path_profile(instance, path)
        return cls(
            path=path,
            demand_index=instance.demand_index[d.id],
            value=float(d.bandwidth if value is None else value),
            arcs=tuple(a for a, _ in prof),
            loads=tuple(l for _, l in prof),
        )

    def coefficient(self, arc_index: int, cycle: int) -> float:
        for a, l in zip(self.arcs, self.loads):
            if a == arc_index:
                return float(l[cycle])
        return 0.0


@dataclass
class CapacityRows:
    """Per-arc divisor and right-hand side of the capacity constraints."""

    divisor: np.ndarray
    rhs: np.ndarray

    @classmethod
    def original(cls, instance: Instance) -> "CapacityRows":
        caps = instance.graph.capacities.astype(float)
        return cls(np.ones_like(caps), caps)


def strengthened_coefficients(instance: Instance, demands=None) -> CapacityRows:
    """Divide every capacity row by the gcd of all packet sizes and floor the right-hand side."""
    demands = instance.demands if demands is None else demands
    ps = 0
    for d in demands:
        ps = math.gcd(ps, d.packet_size)
    ps = max(ps, 1)
    caps = instance.graph.capacities
    return CapacityRows(np.full(caps.shape, float(ps)), (caps // ps).astype(float))


@dataclass
class MasterSolution:
    columns: list[Column]
    y: np.ndarray
    objective: float
    duals: DualValues
    rows: CapacityRows = field(repr=False, default=None)

    def fractional(self, tol: float = 1e-9) -> list[tuple[Column, float]]:
        return [(col, float(v)) for col, v in zip(self.columns, self.y) if v > tol]


def solve_restricted_master(
    instance: Instance,
    columns: Sequence[Column],
    strengthen: bool = False,
    rows: Optional[CapacityRows] = None,
) -> MasterSolution:
    """Solve the LP relaxation over ``columns``; returns primal values and per-du duals."""
    if rows is None:
        rows = strengthened_coefficients(instance) if strengthen else CapacityRows.original(instance)
    nD = len(instance.demands)
    C = instance.C
    n = len(columns)

    cap_row: dict[int, int] = {}
    r_idx, c_idx, vals = [], [], []
    for j, col in enumerate(columns):
        r_idx.append(col.demand_index)
        c_idx.append(j)
        vals.append(1.0)
        for a, load in zip(col.arcs, col.loads):
            div = rows.divisor[a]
            for c in np.nonzero(load)[0]:
                key = a * C + int(c)
                row = cap_row.get(key)
                if row is None:
                    row = cap_row[key] = nD + len(cap_row)
                r_idx.append(row)
                c_idx.append(j)
                vals.append(load[c] / div)
    m = nD + len(cap_row)
    A = sparse.csr_matrix((vals, (r_idx, c_idx)), shape=(m, n))
    b = np.empty(m)
    b[:nD] = 1.0
    keys = np.fromiter(cap_row.keys(), dtype=np.int64, count=len(cap_row))
    b[nD:] = rows.rhs[keys // C] if keys.size else []
    c = np.array([col.value for col in columns], dtype=float)

    res = solve_lp(c, A, b, context=f"restricted master, {n} columns")
    lam = res.duals[:nD].copy()
    mu = np.zeros((len(instance.graph.arcs), C))
    if keys.size:
        mu[keys // C, keys % C] = res.duals[nD:] / rows.divisor[keys // C]
    return MasterSolution(list(columns), res.x, res.objective, DualValues(lam, mu), rows)
