"""Instance builders and brute-force reference computations used across the test suite.

The reference routines deliberately avoid the package's walker, profiles and LP code so that
they can act as independent oracles.
"""

from __future__ import annotations

import itertools
import math
import random
from typing import Iterable, Optional

import numpy as np
from scipy.optimize import linprog

from csqf_planner.model import Arc, Demand, GlobalParams, Instance, NetworkGraph, SPath
from csqf_planner.oracle import OracleLimits


def make_instance(
    C: int,
    R: int,
    arcs: Iterable[tuple[str, str, int, int]],
    demands: Iterable[tuple],
    nodes: Optional[Iterable[str]] = None,
) -> Instance:
    arcs = [Arc(*a) for a in arcs]
    if nodes is None:
        seen: dict[str, None] = {}
        for a in arcs:
            seen.setdefault(a.src)
            seen.setdefault(a.dst)
        nodes = list(seen)
    ds = [Demand(*d) for d in demands]
    return Instance(GlobalParams(C, R), NetworkGraph(tuple(nodes), tuple(arcs)), tuple(ds))


def two_hop_instance(b_a2: int = 3, R: int = 1) -> Instance:
    """Two-hop example: d from s to t with pattern [2,1], d' from u to t with pattern [0,2]."""
    return make_instance(
        C=2,
        R=R,
        arcs=[("s", "u", 5, 10), ("u", "t", 2, b_a2)],
        demands=[("d", "s", "t", (2, 1), 8), ("d'", "u", "t", (0, 2), 2)],
    )


P1 = SPath("d", (("s", "u"), ("u", "t")), (0,))
P2 = SPath("d", (("s", "u"), ("u", "t")), (1,))
P_PRIME = SPath("d'", (("u", "t"),), ())


def diamond_instance(loaded_cap: int = 4, free_cap: int = 4) -> Instance:
    """s -> {a, b} -> t with equal delays; demand x from s to t and a blocker y on a -> t."""
    return make_instance(
        C=2,
        R=0,
        arcs=[
            ("s", "a", 1, 10),
            ("s", "b", 1, 10),
            ("a", "t", 1, loaded_cap),
            ("b", "t", 1, free_cap),
        ],
        demands=[("y", "a", "t", (2, 2), 5), ("x", "s", "t", (1, 1), 5)],
    )


def random_instance(
    seed: int,
    n_nodes: int = 6,
    n_demands: int = 4,
    C: int = 3,
    R: int = 1,
    density: float = 0.45,
    max_delay: int = 3,
    max_cap: int = 4,
    packet_sizes: tuple[int, ...] = (1,),
) -> Instance:
    """Random directed graph with random patterns; deadlines are loose enough for shifts."""
    rng = random.Random(seed)
    nodes = [f"n{i}" for i in range(n_nodes)]
    arcs = []
    for u, v in itertools.permutations(range(n_nodes), 2):
        if rng.random() < density:
            arcs.append((nodes[u], nodes[v], rng.randint(1, max_delay), rng.randint(0, max_cap)))
    # a ring keeps the graph strongly connected
    present = {(a[0], a[1]) for a in arcs}
    for i in range(n_nodes):
        u, v = nodes[i], nodes[(i + 1) % n_nodes]
        if (u, v) not in present:
            arcs.append((u, v, rng.randint(1, max_delay), rng.randint(1, max_cap)))
    demands = []
    for k in range(n_demands):
        s, t = rng.sample(nodes, 2)
        ps = rng.choice(packet_sizes)
        pattern = [ps * rng.randint(0, 2) for _ in range(C)]
        if not any(pattern):
            pattern[rng.randrange(C)] = ps
        deadline = rng.randint(2, 3 * max_delay + 2)
        demands.append((f"d{k}", s, t, tuple(pattern), deadline, ps))
    return make_instance(C, R, arcs, demands, nodes)


# --- independent references ----------------------------------------------------------------------


def naive_simple_paths(instance: Instance, s: str, t: str) -> list[list[tuple[str, str]]]:
    succ: dict[str, list[str]] = {v: [] for v in instance.graph.nodes}
    for a in instance.graph.arcs:
        if a.capacity > 0:
            succ[a.src].append(a.dst)
    out: list[list[tuple[str, str]]] = []

    def rec(v: str, seen: list[str]) -> None:
        if v == t:
            out.append(list(zip(seen[:-1], seen[1:])))
            return
        for w in succ[v]:
            if w not in seen:
                rec(w, seen + [w])

    rec(s, [s])
    return out


def naive_delay(instance: Instance, arcs: list[tuple[str, str]], shifts: tuple[int, ...]) -> int:
    return sum(instance.graph.arc(a).delay for a in arcs) + sum(shifts)


def naive_spaths(instance: Instance, demand: Demand) -> list[SPath]:
    """All simple routing paths times all shift vectors that meet the deadline."""
    out = []
    for arcs in naive_simple_paths(instance, demand.source, demand.target):
        for shifts in itertools.product(range(instance.R + 1), repeat=len(arcs) - 1):
            if naive_delay(instance, arcs, shifts) <= demand.deadline:
                out.append(SPath(demand.id, tuple(arcs), tuple(shifts)))
    return out


def naive_loads(instance: Instance, p: SPath) -> dict[tuple[tuple[str, str], int], int]:
    """(arc, cycle) -> du, straight from the required-bandwidth definition."""
    d = instance.demand(p.demand)
    C = instance.C
    out = {}
    shift = 0
    for k, a in enumerate(p.arcs):
        for c in range(C):
            out[(a, c)] = d.pattern[(c + shift) % C]
        shift += instance.graph.arc(a).delay + (p.shifts[k] if k < len(p.shifts) else 0)
    return out


def naive_weight(instance: Instance, p: SPath, mu: np.ndarray) -> float:
    ai = instance.graph.arc_index
    return sum(du * mu[ai[a], c] for (a, c), du in naive_loads(instance, p).items())


def full_lp_bound(instance: Instance, strengthen: bool = False) -> float:
    """LP relaxation over every feasible s-path, solved by interior point (independent route)."""
    paths = [p for d in instance.demands for p in naive_spaths(instance, d)]
    if not paths:
        return 0.0
    ai = instance.graph.arc_index
    C = instance.C
    nD, nA = len(instance.demands), len(instance.graph.arcs)
    ps = 1
    if strengthen:
        ps = 0
        for d in instance.demands:
            ps = math.gcd(ps, d.packet_size)
    A = np.zeros((nD + nA * C, len(paths)))
    for j, p in enumerate(paths):
        A[instance.demand_index[p.demand], j] = 1.0
        for (a, c), du in naive_loads(instance, p).items():
            A[nD + ai[a] * C + c, j] += du / ps
    b = np.concatenate([np.ones(nD), np.repeat(instance.graph.capacities // ps, C).astype(float)])
    c = -np.array([instance.demand(p.demand).bandwidth for p in paths], dtype=float)
    res = linprog(c, A_ub=A, b_ub=b, bounds=(0, None), method="highs-ipm")
    assert res.status == 0, res.message
    return -res.fun


def exhaustive_optimum(instance: Instance) -> int:
    """Integer optimum by trying every combination of (path or reject) per demand."""
    options = [[None] + naive_spaths(instance, d) for d in instance.demands]
    best = 0
    caps = {a.key: a.capacity for a in instance.graph.arcs}
    for combo in itertools.product(*options):
        load: dict = {}
        ok = True
        for p in combo:
            if p is None:
                continue
            for key, du in naive_loads(instance, p).items():
                load[key] = load.get(key, 0) + du
                if load[key] > caps[key[0]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            best = max(best, sum(instance.demand(p.demand).bandwidth for p in combo if p is not None))
    return best


def loose_limits() -> OracleLimits:
    """Oracle limits wide enough for the random test graphs (dense, up to hundreds of s-paths)."""
    return OracleLimits(max_spaths_per_demand=2000)
