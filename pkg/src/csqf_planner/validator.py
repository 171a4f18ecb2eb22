"""Independent feasibility checks for plans: uniqueness, capacity, deadlines, shifts, chaining."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Union

import numpy as np

from .model import Instance, ModelError, PlanSolution, SPath


class StructureError(ModelError):
    """A solution references demands or arcs that do not exist in the instance."""


@dataclass(frozen=True)
class Violation:
    kind: str  # uniqueness | capacity | deadline | shift-bound | connectivity
    demand: Optional[str] = None
    arc: Optional[tuple[str, str]] = None
    cycle: Optional[int] = None
    magnitude: float = 0.0
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "demand": self.demand,
            "arc": list(self.arc) if self.arc else None,
            "cycle": self.cycle,
            "magnitude": self.magnitude,
            "detail": self.detail,
        }


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    objective: int = 0

    @property
    def feasible(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict[str, Any]:
        return {
            "feasible": self.feasible,
            "objective": self.objective,
            "violations": [v.to_dict() for v in self.violations],
        }


SolutionLike = Union[PlanSolution, Iterable[SPath]]


def _paths_of(solution: SolutionLike) -> list[SPath]:
    if isinstance(solution, PlanSolution):
        return solution.paths
    return list(solution)


def _check_references(instance: Instance, paths: list[SPath]) -> None:
    for p in paths:
        if p.demand not in instance.demand_index:
            raise StructureError(f"assignment references unknown demand {p.demand!r}")
        for key in p.arcs:
            if tuple(key) not in instance.graph.arc_index:
                raise StructureError(f"demand {p.demand!r} uses unknown arc {tuple(key)}")


def _loads(instance: Instance, paths: list[SPath]) -> np.ndarray:
    """Per-arc per-cycle loads computed straight from the definition (no shared helpers)."""
    C = instance.C
    graph = instance.graph
    load = np.zeros((len(graph.arcs), C), dtype=np.int64)
    for p in paths:
        d = instance.demand(p.demand)
        shift = 0
        for k, key in enumerate(p.arcs):
            ai = graph.arc_index[tuple(key)]
            for c in range(C):
                load[ai, c] += d.pattern[(c + shift) % C]
            shift += graph.arcs[ai].delay
            if k < len(p.shifts):
                shift += p.shifts[k]
    return load


def load_matrix(instance: Instance, solution: SolutionLike) -> np.ndarray:
    """load[a][c]: data units used on arc ``a`` (instance arc order) in cycle ``c``."""
    paths = _paths_of(solution)
    _check_references(instance, paths)
    return _loads(instance, paths)


def _connectivity(instance: Instance, p: SPath) -> list[str]:
    d = instance.demand(p.demand)
    problems = []
    if not p.arcs:
        return ["empty arc list"]
    if p.arcs[0][0] != d.source:
        problems.append(f"path starts at {p.arcs[0][0]}, demand source is {d.source}")
    if p.arcs[-1][1] != d.target:
        problems.append(f"path ends at {p.arcs[-1][1]}, demand target is {d.target}")
    for k in range(len(p.arcs) - 1):
        if p.arcs[k][1] != p.arcs[k + 1][0]:
            problems.append(f"arcs {k} and {k + 1} do not chain")
    nodes = [p.arcs[0][0]] + [v for _, v in p.arcs]
    if len(set(nodes)) != len(nodes):
        problems.append("path revisits a node")
    if len(p.shifts) != len(p.arcs) - 1:
        problems.append(f"{len(p.shifts)} shifts for {len(p.arcs) - 1} intermediate nodes")
    return problems


def validate(instance: Instance, solution: SolutionLike) -> ValidationReport:
    """Check a plan against uniqueness, per-cycle capacity, deadlines, shift bounds and chaining.

    Raises StructureError when the plan references unknown demands or arcs; everything else is
    reported as a violation.
    """
    paths = _paths_of(solution)
    _check_references(instance, paths)
    report = ValidationReport()
    graph = instance.graph
    R = instance.R

    counts = Counter(p.demand for p in paths)
    for dem, n in sorted(counts.items()):
        if n > 1:
            report.violations.append(
                Violation("uniqueness", demand=dem, magnitude=n - 1, detail=f"{n} s-paths assigned")
            )

    chained = []
    for p in paths:
        problems = _connectivity(instance, p)
        for msg in problems:
            report.violations.append(Violation("connectivity", demand=p.demand, detail=msg))
        for k, r in enumerate(p.shifts):
            if not 0 <= r <= R:
                report.violations.append(
                    Violation(
                        "shift-bound",
                        demand=p.demand,
                        magnitude=r - R if r > R else -r,
                        detail=f"shift {r} at intermediate node {k + 1} outside [0, {R}]",
                    )
                )
        if problems:
            continue
        chained.append(p)
        d = instance.demand(p.demand)
        delay = sum(graph.arc(a).delay for a in p.arcs) + sum(p.shifts)
        if delay > d.deadline:
            report.violations.append(
                Violation(
                    "deadline",
                    demand=p.demand,
                    magnitude=delay - d.deadline,
                    detail=f"delay {delay} > deadline {d.deadline}",
                )
            )

    load = _loads(instance, chained)
    over = load - graph.capacities[:, None]
    for ai, c in zip(*np.nonzero(over > 0)):
        report.violations.append(
            Violation(
                "capacity",
                arc=graph.arcs[ai].key,
                cycle=int(c),
                magnitude=float(over[ai, c]),
                detail=f"load {int(load[ai, c])} > capacity {graph.arcs[ai].capacity}",
            )
        )

    seen: set[str] = set()
    for p in paths:
        if p.demand not in seen:
            seen.add(p.demand)
            report.objective += instance.demand(p.demand).bandwidth
    return report
