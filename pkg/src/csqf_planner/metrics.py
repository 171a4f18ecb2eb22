"""Reporting metrics shared by the CLI, the service and the comparison harness."""

from __future__ import annotations

from typing import Iterable, Optional

from .model import Instance, PlanSolution


def accepted_traffic_pct(instance: Instance, solution: PlanSolution) -> float:
    """Accepted hypercycle volume as a percentage of the total offered volume."""
    total = instance.total_bandwidth
    if total == 0:
        return 0.0
    return 100.0 * solution.objective / total


def gap_pct(objective: float, upper_bound: Optional[float]) -> Optional[float]:
    """Relative distance of ``objective`` below ``upper_bound`` in percent; None without a bound."""
    if upper_bound is None:
        return None
    if upper_bound <= 0:
        return 0.0
    return 100.0 * (upper_bound - objective) / upper_bound


def best_upper_bound(bounds: Iterable[Optional[float]]) -> Optional[float]:
    """Tightest of several valid upper bounds on the same instance."""
    finite = [b for b in bounds if b is not None]
    return min(finite) if finite else None
