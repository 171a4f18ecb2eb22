from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from csqf_planner.io import (
    FORMAT_VERSION,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    load_solution,
    save_instance,
    save_solution,
    solution_from_dict,
    solution_to_dict,
    spath_from_dict,
    spath_to_dict,
)
from csqf_planner.model import ModelError, PlanSolution

from helpers import P2, P_PRIME, naive_spaths, random_instance, two_hop_instance


@given(st.integers(0, 10_000), st.integers(1, 4), st.integers(0, 2))
def test_instance_round_trip(seed, C, R):
    inst = random_instance(seed, C=C, R=R, packet_sizes=(1, 2))
    doc = json.loads(json.dumps(instance_to_dict(inst)))
    assert instance_from_dict(doc) == inst


@given(st.integers(0, 10_000))
def test_spath_and_solution_round_trip(seed):
    inst = random_instance(seed, n_nodes=5, n_demands=3)
    chosen = []
    for d in inst.demands:
        paths = naive_spaths(inst, d)
        if paths:
            chosen.append(paths[seed % len(paths)])
    for p in chosen:
        assert spath_from_dict(json.loads(json.dumps(spath_to_dict(p)))) == p
    sol = PlanSolution.from_paths(inst, chosen)
    back = solution_from_dict(json.loads(json.dumps(solution_to_dict(sol))), inst)
    assert back == sol


def test_files_round_trip(tmp_path):
    inst = two_hop_instance()
    sol = PlanSolution.from_paths(inst, [P2, P_PRIME])
    save_instance(inst, tmp_path / "i.json")
    save_solution(sol, tmp_path / "s.json")
    assert load_instance(tmp_path / "i.json") == inst
    assert load_solution(tmp_path / "s.json", inst) == sol


def test_documents_carry_format_version():
    inst = two_hop_instance()
    assert instance_to_dict(inst)["format_version"] == FORMAT_VERSION
    assert solution_to_dict(PlanSolution.empty(inst))["format_version"] == FORMAT_VERSION


def test_unknown_format_version_is_rejected():
    doc = instance_to_dict(two_hop_instance())
    doc["format_version"] = 99
    with pytest.raises(ModelError):
        instance_from_dict(doc)


def test_malformed_instance_is_a_model_error():
    doc = instance_to_dict(two_hop_instance())
    del doc["arcs"][0]["capacity_du"]
    with pytest.raises(ModelError):
        instance_from_dict(doc)
