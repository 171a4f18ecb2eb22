"""Randomized rounding of a fractional master solution into one s-path per demand."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..model import Instance, PlanSolution
from .master import Column, MasterSolution


@dataclass
class RoundingResult:
    solution: PlanSolution
    value: float
    best_run: int
    run_values: list[float]


def round_once(
    instance: Instance,
    groups: dict[int, list[tuple[Column, float]]],
    rng: np.random.Generator,
) -> tuple[list[Column], float]:
    """One rounding pass over ``groups`` (demand index -> [(column, y)]); returns picks and value."""
    caps = instance.graph.capacities
    load = np.zeros((len(instance.graph.arcs), instance.C), dtype=np.int64)
    chosen: list[Column] = []
    value = 0.0
    order = sorted(groups)
    for di in rng.permutation(order):
        cands = list(groups[int(di)])
        while cands:
            weights = np.array([y for _, y in cands])
            k = int(rng.choice(len(cands), p=weights / weights.sum()))
            col = cands[k][0]
            if all((load[a] + l <= caps[a]).all() for a, l in zip(col.arcs, col.loads)):
                for a, l in zip(col.arcs, col.loads):
                    load[a] += l
                chosen.append(col)
                value += col.value
                break
            del cands[k]
    return chosen, value


def randomized_rounding(
    instance: Instance,
    fractional: MasterSolution,
    runs: int = 50,
    seed: int = 0,
    tol: float = 1e-9,
) -> RoundingResult:
    """Sample s-paths proportionally to their fractional values; keep the best of ``runs`` runs.

    Demands are visited in a fresh random order per run. A sampled s-path that does not fit the
    residual capacity is discarded and the remaining probabilities renormalized. Ties between
    runs go to the lowest run index.
    """
    groups: dict[int, list[tuple[Column, float]]] = defaultdict(list)
    for col, y in fractional.fractional(tol):
        groups[col.demand_index].append((col, y))

    best: Optional[list[Column]] = None
    best_value = -1.0
    best_run = -1
    values = []
    for run in range(max(runs, 1)):
        rng = np.random.default_rng([seed, run])
        chosen, value = round_once(instance, groups, rng)
        values.append(value)
        if value > best_value:
            best, best_value, best_run = chosen, value, run
    solution = PlanSolution.from_paths(instance, [c.path for c in best or []])
    return RoundingResult(solution, best_value, best_run, values)
