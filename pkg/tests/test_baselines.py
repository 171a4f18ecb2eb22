from __future__ import annotations

from hypothesis import given
from hypothesis import strategies as st

from csqf_planner.baselines import nocycleinfo_plan, worst_case_instance
from csqf_planner.model import PlanSolution
from csqf_planner.oracle import brute_force_optimum
from csqf_planner.validator import load_matrix, validate

from helpers import loose_limits, make_instance, random_instance, two_hop_instance


def test_worst_case_reserves_total_volume_every_cycle():
    inst = two_hop_instance()
    worst = worst_case_instance(inst)
    assert worst.demand("d").pattern == (3, 3)
    assert worst.demand("d'").pattern == (2, 2)
    assert worst.R == 0


def test_pattern_2_1_reserves_3_per_cycle_on_each_arc():
    inst = make_instance(2, 1, [("s", "u", 1, 9), ("u", "t", 1, 9)], [("x", "s", "t", (2, 1), 5)])
    res = nocycleinfo_plan(inst, rr_runs=3)
    worst = worst_case_instance(inst)
    load = load_matrix(worst, res.solution.paths)
    assert (load == 3).all()
    assert res.solution.objective == 3


def test_empty_demand_set():
    inst = make_instance(2, 0, [("s", "t", 1, 1)], [])
    res = nocycleinfo_plan(inst)
    assert res.solution == PlanSolution.empty(inst)
    assert res.upper_bound == 0


def test_two_hop_baseline_cannot_fit_both():
    res = nocycleinfo_plan(two_hop_instance(), rr_runs=5)
    assert res.solution.objective == 3  # d needs 3 du every cycle on a2, which is all of it


@given(st.integers(0, 10_000))
def test_reservation_plans_are_feasible_for_both_models(seed):
    inst = random_instance(seed, n_demands=5)
    res = nocycleinfo_plan(inst, rr_runs=5, seed=seed)
    assert validate(inst, res.solution).feasible
    assert validate(worst_case_instance(inst), res.solution.paths).feasible
    assert all(not any(p.shifts) for p in res.solution.paths)


@given(st.integers(0, 10_000))
def test_never_beats_the_cycle_aware_optimum(seed):
    inst = random_instance(seed, n_demands=4)
    res = nocycleinfo_plan(inst, rr_runs=5)
    assert res.solution.objective <= brute_force_optimum(inst, loose_limits()).objective
