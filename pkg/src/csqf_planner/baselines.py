"""NoCycleInfo: plan without knowledge of per-cycle patterns by reserving worst-case bandwidth."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .cg.solver import DEFAULT_RR_RUNS, CGRRResult, solve_cg_rr
from .greedy import greedy_plan
from .model import Demand, Instance, PlanSolution


def worst_case_instance(instance: Instance) -> Instance:
    """Each demand needs its whole hypercycle volume in every cycle; no extra shifts."""
    C = instance.C
    demands = [
        Demand(d.id, d.source, d.target, (d.bandwidth,) * C, d.deadline, d.packet_size)
        for d in instance.demands
    ]
    return Instance(instance.params, instance.graph, tuple(demands)).with_params(max_extra_shift=0)


@dataclass
class NoCycleInfoResult:
    solution: PlanSolution
    upper_bound: float
    inner: CGRRResult
    timings: dict[str, float]


def nocycleinfo_plan(
    instance: Instance,
    strengthen: bool = True,
    rr_runs: int = DEFAULT_RR_RUNS,
    seed: int = 0,
) -> NoCycleInfoResult:
    """CG-RR on the worst-case reservation instance, mapped back onto ``instance``.

    Objective coefficients stay the original hypercycle bandwidths, so the returned upper bound
    is in the same units as the cycle-aware one.
    """
    worst = worst_case_instance(instance)
    values = {d.id: float(d.bandwidth) for d in instance.demands}
    t0 = time.perf_counter()
    seeds = greedy_plan(worst).paths
    t_seed = time.perf_counter() - t0
    inner = solve_cg_rr(worst, strengthen, rr_runs, seed, seeds, values=values)
    solution = PlanSolution.from_paths(instance, inner.solution.paths)
    timings = {"greedy_seed": t_seed, **inner.timings}
    return NoCycleInfoResult(solution, inner.upper_bound, inner, timings)
