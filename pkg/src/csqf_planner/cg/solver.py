"""Column generation for the LP relaxation, followed by randomized rounding (CG-RR)."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from ..model import Instance, PlanSolution, SPath
from .master import CapacityRows, Column, MasterSolution, solve_restricted_master, strengthened_coefficients
from .pricing import price_demand
from .rounding import RoundingResult, randomized_rounding

log = logging.getLogger(__name__)

DEFAULT_RR_RUNS = 50


@dataclass
class CGResult:
    master: MasterSolution
    iterations: int
    proven: bool
    history: list[float] = field(default_factory=list)
    master_time: float = 0.0
    pricing_time: float = 0.0

    @property
    def upper_bound(self) -> float:
        return self.master.objective

    @property
    def columns(self) -> list[Column]:
        return self.master.columns


def column_generation(
    instance: Instance,
    strengthen: bool = True,
    seed_columns: Iterable[SPath] = (),
    *,
    values: Optional[Mapping[str, float]] = None,
    max_master_solves: Optional[int] = None,
) -> CGResult:
    """Alternate master solves and pricing until no demand has a separating s-path.

    ``values`` overrides the objective coefficient per demand id (default: bandwidth). The
    master is solved at most ``max_master_solves`` times (default 10 x number of demands);
    hitting the cap returns the last restricted optimum with ``proven=False``.
    """
    demands = instance.demands
    cap = max_master_solves if max_master_solves is not None else max(10 * len(demands), 1)
    rows: CapacityRows = strengthened_coefficients(instance) if strengthen else CapacityRows.original(instance)
    value_of = {d.id: float(d.bandwidth if values is None else values[d.id]) for d in demands}

    columns: list[Column] = []
    known: set[SPath] = set()
    for p in seed_columns:
        if p not in known:
            known.add(p)
            columns.append(Column.build(instance, p, value_of[p.demand]))

    history: list[float] = []
    t_master = t_price = 0.0
    proven = False
    solves = 0
    while True:
        t0 = time.perf_counter()
        ms = solve_restricted_master(instance, columns, rows=rows)
        t_master += time.perf_counter() - t0
        solves += 1
        history.append(ms.objective)

        t0 = time.perf_counter()
        new = []
        for d in demands:
            hit = price_demand(instance, d, ms.duals, value_of[d.id])
            if hit is None:
                continue
            if hit.path in known:
                log.warning("pricing returned an existing column for %s; treating as converged", d.id)
                continue
            known.add(hit.path)
            new.append(Column.build(instance, hit.path, value_of[d.id]))
        t_price += time.perf_counter() - t0

        if not new:
            proven = True
            break
        if solves >= cap:
            log.warning("column generation stopped after %d master solves without proof", solves)
            break
        columns.extend(new)

    return CGResult(ms, solves, proven, history, t_master, t_price)


@dataclass
class CGRRResult:
    cg: CGResult
    rounding: RoundingResult
    timings: dict[str, float]

    @property
    def solution(self) -> PlanSolution:
        return self.rounding.solution

    @property
    def upper_bound(self) -> float:
        return self.cg.upper_bound


def solve_cg_rr(
    instance: Instance,
    strengthen: bool = True,
    rr_runs: int = DEFAULT_RR_RUNS,
    seed: int = 0,
    seed_columns: Optional[Iterable[SPath]] = None,
    *,
    values: Optional[Mapping[str, float]] = None,
) -> CGRRResult:
    """Full CG-RR pipeline; seed columns default to the greedy solution's s-paths."""
    timings: dict[str, float] = {}
    if seed_columns is None:
        from ..greedy import greedy_plan

        t0 = time.perf_counter()
        seed_columns = greedy_plan(instance).paths
        timings["greedy_seed"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    cg = column_generation(instance, strengthen, seed_columns, values=values)
    timings["column_generation"] = time.perf_counter() - t0
    timings["master"] = cg.master_time
    timings["pricing"] = cg.pricing_time
    t0 = time.perf_counter()
    rr = randomized_rounding(instance, cg.master, rr_runs, seed)
    timings["rounding"] = time.perf_counter() - t0
    return CGRRResult(cg, rr, timings)
