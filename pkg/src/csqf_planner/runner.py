"""One entry point that runs any planner on an instance and returns the solution with metrics."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

from .baselines import nocycleinfo_plan
from .cg import DEFAULT_RR_RUNS, solve_cg_rr
from .greedy import EPSILON, default_k, greedy_plan
from .metrics import accepted_traffic_pct, gap_pct
from .model import Instance, PlanSolution
from .oracle import OracleLimits, brute_force_optimum

ALGORITHMS = ("greedy", "cg-rr", "nocycleinfo", "oracle")


class ConfigError(ValueError):
    """Invalid solver configuration."""


@dataclass(frozen=True)
class SolveConfig:
    algorithm: str = "cg-rr"
    strengthen: bool = True
    rr_runs: int = DEFAULT_RR_RUNS
    seed: int = 0
    order: str = "input"
    k: Optional[int] = None
    epsilon: float = EPSILON

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {list(ALGORITHMS)}")
        if self.rr_runs < 1:
            raise ConfigError("rr_runs must be >= 1")
        if self.k is not None and self.k < 1:
            raise ConfigError("k must be >= 1")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be > 0")
        kind, _, arg = self.order.partition(":")
        if not (self.order == "input" or (kind == "random" and arg.lstrip("-").isdigit())):
            raise ConfigError(f"unknown order {self.order!r}; use 'input' or 'random:<seed>'")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class RunOutcome:
    solution: PlanSolution
    upper_bound: Optional[float]
    timings: dict[str, float]
    extra: dict[str, Any] = field(default_factory=dict)

    def metrics(self, instance: Instance, config: SolveConfig) -> dict[str, Any]:
        """Self-describing metrics record; wall times are the only non-reproducible fields."""
        effective = config.to_dict()
        if config.algorithm == "greedy" and config.k is None:
            effective["k"] = default_k(instance)
        return {
            "accepted_traffic_pct": accepted_traffic_pct(instance, self.solution),
            "accepted_demand_count": len(self.solution.accepted),
            "demand_count": len(instance.demands),
            "objective_du": self.solution.objective,
            "total_du": instance.total_bandwidth,
            "upper_bound_du": self.upper_bound,
            "gap_pct": gap_pct(self.solution.objective, self.upper_bound),
            "wall_time_per_phase": dict(self.timings),
            "seed": config.seed,
            "config": effective,
            "instance": {
                "nodes": len(instance.graph.nodes),
                "arcs": len(instance.graph.arcs),
                "C": instance.C,
                "R": instance.R,
            },
            **self.extra,
        }


def run(instance: Instance, config: SolveConfig, oracle_limits: Optional[OracleLimits] = None) -> RunOutcome:
    t0 = time.perf_counter()
    if config.algorithm == "greedy":
        solution = greedy_plan(instance, config.order, config.k, config.epsilon)
        return RunOutcome(solution, None, {"greedy": time.perf_counter() - t0})
    if config.algorithm == "cg-rr":
        res = solve_cg_rr(instance, config.strengthen, config.rr_runs, config.seed)
        extra = {
            "iterations": res.cg.iterations,
            "columns": len(res.cg.columns),
            "proven": res.cg.proven,
            "best_rounding_run": res.rounding.best_run,
        }
        return RunOutcome(res.solution, res.upper_bound, dict(res.timings), extra)
    if config.algorithm == "nocycleinfo":
        res = nocycleinfo_plan(instance, config.strengthen, config.rr_runs, config.seed)
        extra = {
            "iterations": res.inner.cg.iterations,
            "columns": len(res.inner.cg.columns),
            "proven": res.inner.cg.proven,
        }
        # The bound belongs to the worst-case reservation problem, not to the instance itself.
        return RunOutcome(res.solution, res.upper_bound, dict(res.timings), extra)
    res = brute_force_optimum(instance, oracle_limits)
    extra = {"explored": res.explored, "spaths": res.spaths}
    return RunOutcome(res.solution, float(res.objective), {"oracle": time.perf_counter() - t0}, extra)


def solve(instance: Instance, config: SolveConfig) -> tuple[PlanSolution, dict[str, Any]]:
    outcome = run(instance, config)
    return outcome.solution, outcome.metrics(instance, config)
