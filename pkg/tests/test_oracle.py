from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from csqf_planner.cg import column_generation, solve_cg_rr
from csqf_planner.greedy import greedy_plan
from csqf_planner.oracle import OracleLimitError, OracleLimits, brute_force_optimum
from csqf_planner.validator import validate

from helpers import P2, P_PRIME, exhaustive_optimum, loose_limits, make_instance, random_instance, two_hop_instance


def test_two_hop_optimum():
    res = brute_force_optimum(two_hop_instance())
    assert res.objective == 5
    assert set(res.solution.paths) == {P2, P_PRIME}


def test_two_hop_without_shifts_loses_a_demand():
    assert brute_force_optimum(two_hop_instance(R=0)).objective == 3


def test_single_demand_is_accepted():
    inst = make_instance(2, 0, [("s", "t", 1, 5)], [("x", "s", "t", (1, 1), 3)])
    assert brute_force_optimum(inst).solution.accepted == ["x"]


def test_refuses_oversized_instances():
    big = random_instance(0, n_nodes=11, n_demands=2)
    with pytest.raises(OracleLimitError):
        brute_force_optimum(big)
    with pytest.raises(OracleLimitError):
        brute_force_optimum(random_instance(0, n_demands=7))
    with pytest.raises(OracleLimitError):
        brute_force_optimum(random_instance(0, C=5))
    with pytest.raises(OracleLimitError):
        brute_force_optimum(random_instance(0, R=2))


def test_refuses_too_many_spaths_instead_of_truncating():
    inst = random_instance(4, n_nodes=7, density=0.9, max_delay=1)
    with pytest.raises(OracleLimitError):
        brute_force_optimum(inst, OracleLimits(max_spaths_per_demand=2))


@given(st.integers(0, 10_000))
def test_matches_plain_enumeration(seed):
    inst = random_instance(seed, n_nodes=5, n_demands=3, C=3)
    res = brute_force_optimum(inst, loose_limits())
    assert validate(inst, res.solution).feasible
    assert res.objective == exhaustive_optimum(inst)


@given(st.integers(0, 10_000))
def test_sits_between_heuristics_and_bound(seed):
    inst = random_instance(seed, n_demands=5)
    opt = brute_force_optimum(inst, loose_limits()).objective
    assert greedy_plan(inst).objective <= opt
    assert solve_cg_rr(inst, rr_runs=5).solution.objective <= opt
    assert opt <= column_generation(inst).upper_bound + 1e-6
