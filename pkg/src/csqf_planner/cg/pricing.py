"""Separating s-path search on the time-expanded graph.

Nodes of the expanded graph are (node, cycle offset) pairs; traversing arc (u, v) from offset c
with an extra shift r at v lands on (v, (c + delay + r) % C). The graph is explored depth-first
and generated on the fly.

A partial path is pruned when a stored label at the same (node, offset) has no larger weight, no
larger delay and a visited set contained in the partial path's. Arc weights only depend on the
departure offset, so any completion of the pruned path is also a completion of the label's path
with no larger weight and delay.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..model import Demand, Instance, SPath

SEPARATION_TOL = 1e-9


class EnumerationLimitError(RuntimeError):
    pass


@dataclass
class DualValues:
    """Duals of the restricted master.

    ``demand`` holds one lambda per demand (instance order). ``capacity`` holds per-du prices
    mu[a, c]; for strengthened rows the row dual has already been divided by the arc divisor.
    """

    demand: np.ndarray
    capacity: np.ndarray

    @classmethod
    def zeros(cls, instance: Instance) -> "DualValues":
        return cls(np.zeros(len(instance.demands)), np.zeros((len(instance.graph.arcs), instance.C)))


@dataclass(frozen=True)
class WalkResult:
    path: SPath
    weight: float
    delay: int


def shifted_patterns(pattern: Sequence[int]) -> np.ndarray:
    """B[c, c'] = pattern[(c + c') % C]."""
    bw = np.asarray(pattern, dtype=float)
    return np.stack([np.roll(bw, -c) for c in range(bw.size)])


def arc_weight(d: Demand, duals: DualValues, arc_index: int, offset: int) -> float:
    """Dual weight of traversing an arc when leaving its tail ``offset`` cycles after emission."""
    C = len(d.pattern)
    mu = duals.capacity[arc_index]
    return float(sum(d.pattern[(offset + c) % C] * mu[c] for c in range(C)))


def arc_weights(d: Demand, mu: np.ndarray) -> np.ndarray:
    """Matrix W[a, c] of ``arc_weight`` for every arc and departure offset."""
    W = np.zeros_like(mu, dtype=float)
    rows = np.nonzero(mu.any(axis=1))[0]
    if rows.size:
        W[rows] = mu[rows] @ shifted_patterns(d.pattern).T
    return W


def _reverse_dijkstra(instance: Instance, target: int, lengths: Optional[Sequence[float]]) -> list[float]:
    """Distance from every node to ``target`` over usable arcs (``lengths`` per arc, default delay)."""
    graph = instance.graph
    inc = graph.usable_in
    dist = [math.inf] * len(graph.nodes)
    dist[target] = 0
    heap = [(0, target)]
    while heap:
        du, u = heapq.heappop(heap)
        if du > dist[u]:
            continue
        for a, v, delay in inc[u]:
            nd = du + (delay if lengths is None else lengths[a])
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def shortest_delay(instance: Instance, source: str, target: str) -> float:
    ni = instance.graph.node_index
    return _reverse_dijkstra(instance, ni[target], None)[ni[source]]


def walk(
    instance: Instance,
    demand: Demand,
    *,
    weights: Optional[np.ndarray] = None,
    target: float = math.inf,
    bound: Optional[int] = None,
    dominance: bool = True,
    first_only: bool = True,
    limit: Optional[int] = None,
) -> list[WalkResult]:
    """Depth-first search for s-paths of ``demand`` with delay <= bound and weight < target.

    With ``first_only`` the search stops at the first hit. ``weights`` is an (arcs x C) matrix of
    per-offset arc weights; None means all-zero weights. ``limit`` raises EnumerationLimitError
    once more than ``limit`` paths have been collected.
    """
    graph = instance.graph
    C, R = instance.C, instance.R
    ni = graph.node_index
    s, t = ni[demand.source], ni[demand.target]
    bound = demand.deadline if bound is None else min(bound, demand.deadline)
    out = graph.usable_out

    dist_t = _reverse_dijkstra(instance, t, None)
    if dist_t[s] > bound:
        return []
    if weights is None:
        W = None
        wlb = [0.0] * len(graph.nodes)
    else:
        W = weights.tolist()
        wlb = _reverse_dijkstra(instance, t, weights.min(axis=1).tolist())
    if wlb[s] >= target:
        return []

    results: list[WalkResult] = []
    labels: dict[int, list[tuple[float, int, int]]] = {}
    arc_stack: list[int] = []
    shift_stack: list[int] = []
    arcs = graph.arcs

    def is_dominated(key: int, w: float, delay: int, mask: int) -> bool:
        stored = labels.get(key)
        if stored is None:
            labels[key] = [(w, delay, mask)]
            return False
        for lw, ld, lm in stored:
            if lw <= w and ld <= delay and not (lm & ~mask):
                return True
        stored[:] = [l for l in stored if not (w <= l[0] and delay <= l[1] and not (mask & ~l[2]))]
        stored.append((w, delay, mask))
        return False

    def emit(w: float, delay: int) -> None:
        path = SPath(demand.id, tuple(arcs[a].key for a in arc_stack), tuple(shift_stack))
        results.append(WalkResult(path, w, delay))
        if limit is not None and len(results) > limit:
            raise EnumerationLimitError(f"demand {demand.id}: more than {limit} s-paths")

    def rec(u: int, delay: int, w: float, mask: int) -> bool:
        off = delay % C
        children = out[u]
        if W is not None and len(children) > 1:
            children = sorted(children, key=lambda x: W[x[0]][off] + wlb[x[1]])
        for a, v, d in children:
            if mask >> v & 1:
                continue
            nd = delay + d
            if nd + dist_t[v] > bound:
                continue
            nw = w if W is None else w + W[a][off]
            if nw + wlb[v] >= target:
                continue
            arc_stack.append(a)
            if v == t:
                emit(nw, nd)
                arc_stack.pop()
                if first_only:
                    return True
                continue
            nmask = mask | (1 << v)
            for r in range(R + 1):
                sd = nd + r
                if sd + dist_t[v] > bound:
                    break
                if dominance and is_dominated(v * C + sd % C, nw, sd, nmask):
                    continue
                shift_stack.append(r)
                found = rec(v, sd, nw, nmask)
                shift_stack.pop()
                if found:
                    arc_stack.pop()
                    return True
            arc_stack.pop()
        return False

    rec(s, 0, 0.0, 1 << s)
    return results


def enumerate_spaths(instance: Instance, demand: Demand, limit: Optional[int] = None) -> list[SPath]:
    """Every simple, deadline-feasible s-path of ``demand`` (zero weights, no pruning by labels)."""
    found = walk(instance, demand, dominance=False, first_only=False, limit=limit)
    return sorted((r.path for r in found), key=SPath.sort_key)


def price_demand(
    instance: Instance,
    d: Demand,
    duals: DualValues,
    value: Optional[float] = None,
    *,
    deepening: bool = True,
    dominance: bool = True,
) -> Optional[WalkResult]:
    """Return an s-path whose dual weight is below ``value - lambda_d``, or None if none exists.

    ``value`` is the objective coefficient of the demand (default: its hypercycle bandwidth).
    With ``deepening`` the delay bound starts at the shortest possible delay and doubles until
    the deadline is reached; only a search at the full deadline can answer None.
    """
    value = d.bandwidth if value is None else value
    lam = float(duals.demand[instance.demand_index[d.id]])
    target = value - lam - SEPARATION_TOL
    if target <= 0:
        return None
    W = arc_weights(d, duals.capacity)
    shortest = shortest_delay(instance, d.source, d.target)
    if shortest > d.deadline:
        return None
    bound = int(shortest) if deepening else d.deadline
    while True:
        found = walk(instance, d, weights=W, target=target, bound=bound, dominance=dominance)
        if found:
            return found[0]
        if bound >= d.deadline:
            return None
        bound = min(2 * bound, d.deadline)
