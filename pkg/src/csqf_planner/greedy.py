"""Greedy one-by-one admission with proportional-fairness load balancing.

Candidate routes force exactly one arc of each mutually avoidable set: the arcs leaving the
first branching node after the source and the arcs entering the last branching node before the
destination. Each route is the shortest-delay path through the forced pair; extra shifts are only
tried at the first intermediate node.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .model import ArcKey, Demand, Instance, PlanSolution, SPath

EPSILON = 1e-6
_PENALTY = 10.0


def default_k(instance: Instance) -> int:
    return 4 * (instance.R + 1)


@dataclass
class CandidateSet:
    demand: str
    paths: list[SPath] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)


class AdmissionState:
    """Loads and assignments of already admitted demands, plus a per-pair route cache."""

    def __init__(self, instance: Instance, epsilon: float = EPSILON):
        self.instance = instance
        self.epsilon = epsilon
        graph = instance.graph
        self.capacity = graph.capacities.astype(np.int64)
        self.load = np.zeros((len(graph.arcs), instance.C), dtype=np.int64)
        self.peak = np.zeros(len(graph.arcs), dtype=np.int64)
        self.assigned: dict[str, SPath] = {}
        self._routes: dict[tuple[str, str], list[tuple[int, ...]]] = {}

    def fits(self, profile: Sequence[tuple[int, np.ndarray]]) -> bool:
        cap = self.capacity
        return all((self.load[a] + l <= cap[a]).all() for a, l in profile)

    def add(self, path: SPath, profile: Sequence[tuple[int, np.ndarray]]) -> None:
        for a, l in profile:
            self.load[a] += l
            self.peak[a] = self.load[a].max()
        self.assigned[path.demand] = path

    def solution(self) -> PlanSolution:
        return PlanSolution.from_paths(self.instance, self.assigned.values())


def availability(state: AdmissionState, a: int | ArcKey) -> float:
    """Share of the arc's capacity unused in its busiest cycle; 0 for zero-capacity arcs."""
    if not isinstance(a, (int, np.integer)):
        a = state.instance.graph.arc_index[tuple(a)]
    cap = state.capacity[a]
    if cap <= 0:
        return 0.0
    return 1.0 - float(state.peak[a]) / float(cap)


def _log_av(peak: float, cap: float, eps: float) -> float:
    if cap <= 0:
        return math.log(eps)
    return math.log(max(1.0 - peak / cap, 0.0) + eps)


def lb_metric(state: AdmissionState) -> float:
    """Sum over arcs of log(availability + epsilon); larger means better balanced."""
    eps = state.epsilon
    return sum(_log_av(p, c, eps) for p, c in zip(state.peak.tolist(), state.capacity.tolist()))


def _dijkstra(
    instance: Instance,
    source: int,
    target: int,
    forbidden: frozenset[int],
    penalty: Optional[dict[int, float]] = None,
) -> Optional[list[int]]:
    """Shortest-delay arc list from ``source`` to ``target`` avoiding ``forbidden`` nodes."""
    out = instance.graph.usable_out
    dist = {source: 0.0}
    prev: dict[int, tuple[int, int]] = {}
    heap = [(0.0, source)]
    while heap:
        du, u = heapq.heappop(heap)
        if u == target:
            break
        if du > dist[u]:
            continue
        for a, v, d in out[u]:
            if v in forbidden:
                continue
            nd = du + d * (penalty.get(a, 1.0) if penalty else 1.0)
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                prev[v] = (u, a)
                heapq.heappush(heap, (nd, v))
    if target not in dist:
        return None
    arcs = []
    v = target
    while v != source:
        u, a = prev[v]
        arcs.append(a)
        v = u
    return arcs[::-1]


def _branch_prefix(instance: Instance, start: int, stop: int, forward: bool) -> tuple[list[int], int]:
    """Follow the unique usable arc away from ``start`` until a node with a choice appears."""
    adj = instance.graph.usable_out if forward else instance.graph.usable_in
    chain: list[int] = []
    seen = {start}
    node = start
    while node != stop:
        options = [(a, v) for a, v, _ in adj[node] if v not in seen]
        if len(options) != 1:
            break
        a, node = options[0]
        seen.add(node)
        chain.append(a)
    return chain, node


def candidate_routes(state: AdmissionState, source: str, target: str, want: int) -> list[tuple[int, ...]]:
    """Diverse routing paths (arc index tuples) from ``source`` to ``target``, cached per pair."""
    key = (source, target)
    if key in state._routes:
        return state._routes[key]
    instance = state.instance
    graph = instance.graph
    ni = graph.node_index
    s, t = ni[source], ni[target]
    arcs = graph.arcs

    head_chain, sb = _branch_prefix(instance, s, t, forward=True)
    routes: list[tuple[int, ...]] = []
    if sb == t:
        routes.append(tuple(head_chain))
    else:
        tail_chain, tb = _branch_prefix(instance, t, sb, forward=False)
        tail_chain = tail_chain[::-1]
        prefix_nodes = {s} | {ni[arcs[a].dst] for a in head_chain}
        suffix_nodes = {t} | {ni[arcs[a].src] for a in tail_chain}
        if sb == tb:
            routes.append(tuple(head_chain + tail_chain))
        else:
            outs = [a for a, v, _ in graph.usable_out[sb] if v not in prefix_nodes]
            ins = [a for a, u, _ in graph.usable_in[tb] if u not in suffix_nodes]
            blocked = frozenset(prefix_nodes | suffix_nodes)
            for ao in outs:
                for ai in ins:
                    h, tl = ni[arcs[ao].dst], ni[arcs[ai].src]
                    if ao == ai:
                        mids = [ao]
                    elif h == tb or tl == sb or h in blocked or tl in blocked:
                        continue
                    elif h == tl:
                        mids = [ao, ai]
                    else:
                        middle = _dijkstra(instance, h, tl, blocked | {sb, tb})
                        if middle is None:
                            continue
                        mids = [ao] + middle + [ai]
                    route = tuple(head_chain + mids + tail_chain)
                    if route not in routes:
                        routes.append(route)
        if len(routes) < want:
            penalty: dict[int, float] = {}
            for r in routes:
                for a in r:
                    penalty[a] = penalty.get(a, 1.0) * _PENALTY
            for _ in range(want):
                r = _dijkstra(instance, s, t, frozenset(), penalty)
                if r is None:
                    break
                for a in r:
                    penalty[a] = penalty.get(a, 1.0) * _PENALTY
                r = tuple(r)
                if r not in routes:
                    routes.append(r)
                if len(routes) >= want:
                    break
    routes.sort(key=lambda r: (sum(arcs[a].delay for a in r), len(r), r))
    state._routes[key] = routes
    return routes


@dataclass
class _Candidate:
    path: SPath
    arcs: np.ndarray
    loads: np.ndarray  # (len(arcs), C)


def _candidates(state: AdmissionState, d: Demand, K: Optional[int]) -> list[_Candidate]:
    instance = state.instance
    K = default_k(instance) if K is None else K
    C, R = instance.C, instance.R
    arcs = instance.graph.arcs
    rot = d.rotations
    out: list[_Candidate] = []
    for route in candidate_routes(state, d.source, d.target, max(K // (R + 1), 1)):
        delays = [arcs[a].delay for a in route]
        total = sum(delays)
        keys = tuple(arcs[a].key for a in route)
        idx = np.fromiter(route, dtype=np.intp, count=len(route))
        base = np.zeros(len(route), dtype=np.int64)
        base[1:] = np.cumsum(delays[:-1])
        cap = state.capacity[idx][:, None]
        current = state.load[idx]
        for r in range(R + 1 if len(route) > 1 else 1):
            if total + r > d.deadline:
                break
            offsets = base.copy()
            offsets[1:] += r
            loads = rot[offsets % C]
            if ((current + loads) <= cap).all():
                shifts = (r,) + (0,) * (len(route) - 2) if len(route) > 1 else ()
                out.append(_Candidate(SPath(d.id, keys, shifts), idx, loads))
                if len(out) >= K:
                    return out
    return out


def generate_candidates(state: AdmissionState, d: Demand, K: Optional[int] = None) -> CandidateSet:
    """Up to K deadline- and residual-feasible s-paths of ``d``."""
    return CandidateSet(d.id, [c.path for c in _candidates(state, d, K)])


def _lb_gain(state: AdmissionState, arcs: np.ndarray, loads: np.ndarray) -> float:
    eps = state.epsilon
    cap = state.capacity[arcs].astype(float)
    old = 1.0 - state.peak[arcs] / cap
    new = 1.0 - (state.load[arcs] + loads).max(axis=1) / cap
    return float(np.sum(np.log(np.maximum(new, 0.0) + eps) - np.log(np.maximum(old, 0.0) + eps)))


def admit(state: AdmissionState, d: Demand, K: Optional[int] = None) -> Optional[SPath]:
    """Admit ``d`` on the candidate maximizing the load-balance metric; None if rejected.

    Ties go to the shortest path, then the smallest total shift, then lexicographic arcs.
    """
    best: Optional[_Candidate] = None
    best_gain = -math.inf
    for cand in sorted(_candidates(state, d, K), key=lambda c: c.path.sort_key()):
        gain = _lb_gain(state, cand.arcs, cand.loads)
        if gain > best_gain + 1e-12:
            best, best_gain = cand, gain
    if best is None:
        return None
    state.add(best.path, list(zip(best.arcs.tolist(), best.loads)))
    return best.path


def resolve_order(instance: Instance, order: str | Sequence[str] | None) -> list[str]:
    """Demand visiting order from ``input``, ``random:<seed>`` or an explicit id sequence."""
    ids = [d.id for d in instance.demands]
    if order is None or order == "input":
        return ids
    if isinstance(order, str):
        kind, _, arg = order.partition(":")
        if kind != "random" or not arg:
            raise ValueError(f"unknown order {order!r}; use 'input' or 'random:<seed>'")
        random.Random(int(arg)).shuffle(ids)
        return ids
    order = list(order)
    if sorted(order) != sorted(ids):
        raise ValueError("order must be a permutation of the demand ids")
    return order


def greedy_plan(
    instance: Instance,
    order: str | Sequence[str] | None = None,
    K: Optional[int] = None,
    epsilon: float = EPSILON,
) -> PlanSolution:
    state = AdmissionState(instance, epsilon)
    for demand_id in resolve_order(instance, order):
        admit(state, instance.demand(demand_id), K)
    return state.solution()


class OnlineAdmission:
    """Demands arrive one at a time over a fixed network and are admitted or rejected for good."""

    def __init__(self, instance: Instance, K: Optional[int] = None, epsilon: float = EPSILON):
        self.state = AdmissionState(instance.with_demands(()), epsilon)
        self.K = K
        self.rejected: list[str] = []
        for d in instance.demands:
            self.offer(d)

    @property
    def instance(self) -> Instance:
        return self.state.instance

    def offer(self, demand: Demand) -> Optional[SPath]:
        # Rebuilding the instance validates endpoints, pattern length and id uniqueness.
        self.state.instance = self.instance.with_demands((*self.instance.demands, demand))
        path = admit(self.state, demand, self.K)
        if path is None:
            self.rejected.append(demand.id)
        return path

    def solution(self) -> PlanSolution:
        return self.state.solution()
