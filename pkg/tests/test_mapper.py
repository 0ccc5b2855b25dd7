from __future__ import annotations

import json
from fractions import Fraction

import pytest

from lscompile.circuit import RandomCircuitSpec, generate_random_circuit, layer_circuit, parse_circuit
from lscompile.mapper import HillClimbConfig, crossing_cost, depth_cost, hill_climb, improvement, neighbors
from lscompile.router import NoFactories
from lscompile.routing_graph import FactoryConfig, build_routing_graph, extent_for, random_labeling


def case(layout="hexagonal", q=10, f=2, ratio=0.8, seed=0, substrate="color"):
    g = build_routing_graph(layout, extent_for(layout, q), substrate, FactoryConfig(f, 2))
    layered = layer_circuit(generate_random_circuit(RandomCircuitSpec("rand", q, cnot_ratio=ratio, seed=seed)))
    return g, layered


def test_improvement():
    assert improvement(10, 8) == Fraction(1, 4)
    assert improvement(10, 8, "initial") == Fraction(1, 5)
    assert improvement(5, 5) == 0
    with pytest.raises(ZeroDivisionError):
        improvement(0, 0)
    with pytest.raises(ValueError):
        improvement(3, 2, "middle")


def test_config_validation():
    for kwargs in ({"restarts": 0}, {"max_iterations": 0}, {"metric": "area"}):
        with pytest.raises(ValueError):
            HillClimbConfig(**kwargs)


def test_neighbors_swap_active_labels():
    g, layered = case()
    lab = random_labeling(g, layered.num_qubits, 0)
    nbs = neighbors(lab, layered)
    k = len(layered.active_labels())
    assert len(nbs) == k * (k - 1) // 2
    for nb in nbs:
        assert sum(a != b for a, b in zip(nb.vertex, lab.vertex)) == 2


@pytest.mark.parametrize("metric", ["crossings", "depth"])
def test_hill_climb_invariants(metric):
    g, layered = case(seed=3)
    cfg = HillClimbConfig(restarts=4, max_iterations=20, metric=metric, rng_seed=9)
    res = hill_climb(g, layered, cfg)
    cost = (lambda lb: crossing_cost(g, layered, lb)) if metric == "crossings" else (
        lambda lb: depth_cost(g, layered, lb))
    assert len(res.traces) == 4
    for tr in res.traces:
        assert all(b < a for a, b in zip(tr.costs, tr.costs[1:]))
        assert tr.costs[0] == cost(tr.initial)
        assert tr.costs[-1] == cost(tr.final)
        assert len(tr.costs) <= 21
    finals = [tr.costs[-1] for tr in res.traces]
    assert res.cost == min(finals)
    assert res.best_restart == finals.index(min(finals))
    assert res.labeling == res.traces[res.best_restart].final
    assert res.initial_depth == depth_cost(g, layered, res.traces[res.best_restart].initial)
    assert res.final_depth == depth_cost(g, layered, res.labeling)
    if metric == "depth":
        assert res.final_depth <= res.initial_depth
    doc = json.loads(res.to_json())
    assert doc["delta_f"] == res.final_depth
    assert res.to_json() == hill_climb(g, layered, cfg).to_json()


def test_restarts_are_seeded_per_index():
    g, layered = case(seed=4)
    a = hill_climb(g, layered, HillClimbConfig(restarts=3, max_iterations=5, rng_seed=1))
    b = hill_climb(g, layered, HillClimbConfig(restarts=5, max_iterations=5, rng_seed=1))
    assert [t.initial for t in a.traces] == [t.initial for t in b.traces[:3]]


def test_local_optimum():
    g, layered = case(q=8, seed=5)
    res = hill_climb(g, layered, HillClimbConfig(restarts=1, max_iterations=200, metric="crossings"))
    assert all(crossing_cost(g, layered, nb) >= res.cost for nb in neighbors(res.labeling, layered))


def test_surface_substrate_uses_reference_path():
    g, layered = case(layout="pair", q=6, ratio=1.0, seed=1, substrate="surface")
    res = hill_climb(g, layered, HillClimbConfig(restarts=2, max_iterations=3, metric="depth"))
    assert res.final_depth == depth_cost(g, layered, res.labeling)
    assert res.final_depth <= res.initial_depth


def test_no_factories():
    g = build_routing_graph("row", extent_for("row", 4), "color")
    with pytest.raises(NoFactories):
        hill_climb(g, layer_circuit(parse_circuit("qubits 4\nt 0\ncnot 1 2\n")))
