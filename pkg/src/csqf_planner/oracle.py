"""Exhaustive exact optimum for tiny instances: enumerate s-paths, then branch and bound."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cg.pricing import EnumerationLimitError, enumerate_spaths
from .model import Instance, PlanSolution, SPath, path_profile


class OracleLimitError(RuntimeError):
    """The instance is too large for exhaustive search."""


@dataclass(frozen=True)
class OracleLimits:
    max_nodes: int = 10
    max_demands: int = 6
    max_cycles: int = 4
    max_shift: int = 1
    max_spaths_per_demand: int = 64


@dataclass
class OracleResult:
    solution: PlanSolution
    objective: int
    explored: int
    spaths: dict[str, int]


def _check_limits(instance: Instance, limits: OracleLimits) -> None:
    checks = [
        ("nodes", len(instance.graph.nodes), limits.max_nodes),
        ("demands", len(instance.demands), limits.max_demands),
        ("C", instance.C, limits.max_cycles),
        ("R", instance.R, limits.max_shift),
    ]
    for name, value, cap in checks:
        if value > cap:
            raise OracleLimitError(f"{name}={value} exceeds oracle limit {cap}")


def brute_force_optimum(instance: Instance, limits: Optional[OracleLimits] = None) -> OracleResult:
    """Provably optimal plan by full enumeration; refuses instances beyond ``limits``."""
    limits = limits or OracleLimits()
    _check_limits(instance, limits)

    options: list[list[tuple[SPath, list[tuple[int, np.ndarray]]]]] = []
    counts: dict[str, int] = {}
    order = sorted(instance.demands, key=lambda d: (-d.bandwidth, d.id))
    for d in order:
        try:
            paths = enumerate_spaths(instance, d, limit=limits.max_spaths_per_demand)
        except EnumerationLimitError as exc:
            raise OracleLimitError(str(exc)) from None
        counts[d.id] = len(paths)
        seen: set[tuple] = set()
        opts = []
        for p in paths:
            prof = path_profile(instance, p)
            sig = tuple((a, tuple(l.tolist())) for a, l in sorted(prof, key=lambda x: x[0]))
            if sig not in seen:
                seen.add(sig)
                opts.append((p, prof))
        options.append(opts)

    bws = [d.bandwidth for d in order]
    remaining = np.cumsum(bws[::-1])[::-1].tolist() + [0]
    caps = instance.graph.capacities
    load = np.zeros((len(instance.graph.arcs), instance.C), dtype=np.int64)
    chosen: list[Optional[SPath]] = [None] * len(order)
    best_value = -1
    best: list[Optional[SPath]] = []
    explored = 0

    def search(i: int, value: int) -> None:
        nonlocal best_value, best, explored
        explored += 1
        if value + remaining[i] <= best_value:
            return
        if i == len(order):
            best_value, best = value, list(chosen)
            return
        for path, prof in options[i]:
            if all((load[a] + l <= caps[a]).all() for a, l in prof):
                for a, l in prof:
                    load[a] += l
                chosen[i] = path
                search(i + 1, value + bws[i])
                chosen[i] = None
                for a, l in prof:
                    load[a] -= l
        search(i + 1, value)

    search(0, 0)
    solution = PlanSolution.from_paths(instance, [p for p in best if p is not None])
    return OracleResult(solution, solution.objective, explored, counts)
