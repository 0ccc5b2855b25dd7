from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from instances import random_instance, schedule_violations
from oracles import valid_path_length

from lscompile.circuit import Gate, IndexedGate, LogicalCircuit, layer_circuit, parse_circuit
from lscompile.router import (
    FactoryState,
    NoFactories,
    RoutingError,
    RoutingTask,
    UnroutableDemand,
    push_leftovers,
    route_circuit,
    shortest_valid_path,
    vdp_subroutine,
)
from lscompile.routing_graph import FactoryConfig, Labeling, build_routing_graph, extent_for, is_valid_path


def oracle_queries(g, rng, count: int):
    ends = [v for v in range(g.num_vertices) if g.types[v] != "A"]
    anc = [v for v in range(g.num_vertices) if g.types[v] == "A"]
    for _ in range(count):
        src = int(rng.choice(ends))
        if g.factory_vertices and rng.random() < 0.3:
            dst = list(g.factory_vertices)
        else:
            dst = [int(rng.choice(ends))]
        occ = {int(v) for v in anc if rng.random() < rng.choice([0.0, 0.1, 0.3])}
        yield src, dst, occ


def check_path_query(g, src, dst, occ):
    got = shortest_valid_path(g, src, dst[0] if len(dst) == 1 else dst, occ)
    want = valid_path_length(g, src, dst, occ)
    if want is None:
        assert got is None
        return
    assert got is not None
    assert len(got) - 1 == want
    assert is_valid_path(g, got)
    assert got[0] == src and got[-1] in dst
    assert not occ.intersection(got)


@pytest.mark.parametrize("seed", range(60))
def test_shortest_path_matches_oracle(seed):
    inst = random_instance(seed, small=True)
    g = inst.graph
    assert g.num_vertices <= 50
    for src, dst, occ in oracle_queries(g, np.random.default_rng(seed), 15):
        check_path_query(g, src, dst, occ)


@pytest.mark.parametrize("layout", ["hexagonal", "row", "pair"])
def test_shortest_path_real_graphs(layout):
    g = build_routing_graph(layout, (5, 5), "color", FactoryConfig(2, 1))
    for src, dst, occ in oracle_queries(g, np.random.default_rng(1), 40):
        check_path_query(g, src, dst, occ)
    gs = build_routing_graph("pair", (5, 5), "surface", FactoryConfig(2, 1))
    for src, dst, occ in oracle_queries(gs, np.random.default_rng(2), 40):
        check_path_query(gs, src, dst, occ)


def test_color_path_lexicographic_tiebreak():
    g = build_routing_graph("hexagonal", (7, 7), "color")
    a, b = g.data_vertices[0], g.data_vertices[-1]
    got = shortest_valid_path(g, a, b)
    # brute force over all shortest paths
    n = len(got) - 1
    paths = []

    def walk(p):
        if len(p) == n:
            paths.extend([p + [b]] if b in g.adjacency[p[-1]] and len(p) >= 2 else [])
            return
        for v in g.adjacency[p[-1]]:
            if g.types[v] == "A" and v not in p:
                walk(p + [v])

    walk([a])
    assert got == min(paths)


def test_surface_paths_use_all_directions():
    g = build_routing_graph("pair", extent_for("pair", 12), "surface", FactoryConfig(2, 1))
    for a in g.data_vertices[:6]:
        for b in g.data_vertices[-6:]:
            p = shortest_valid_path(g, a, b)
            if p is None:
                continue
            mask = 0
            for u, v in zip(p, p[1:]):
                mask |= g.direction[(u, v)]
            assert mask == 7


@pytest.mark.parametrize("seed", range(250))
def test_router_properties(seed):
    inst = random_instance(seed)
    try:
        schedule = route_circuit(inst.task)
    except NoFactories:
        assert not inst.graph.factory_vertices
        assert any(g.kind == "T" for g in inst.circuit.gates)
        return
    except UnroutableDemand:
        g, lab = inst.graph, inst.task.labeling.vertex
        dead = []
        for gate in inst.circuit.gates:
            if gate.kind == "CNOT":
                dead.append(valid_path_length(g, lab[gate.control], [lab[gate.target]], set()) is None)
            else:
                dead.append(valid_path_length(g, lab[gate.target], list(g.factory_vertices), set()) is None)
        assert any(dead)
        return
    assert schedule_violations(inst, schedule) == []


def test_layer_routing_is_greedy_shortest_first():
    g = build_routing_graph("hexagonal", extent_for("hexagonal", 12), "color")
    lab = Labeling(tuple(g.data_vertices[:12]))
    circ = LogicalCircuit(12, tuple(Gate.cnot(2 * k, 2 * k + 1) for k in range(6)))
    task = RoutingTask(g, lab, layer_circuit(circ))
    routed, left = vdp_subroutine(task, list(task.layered.layers[0]))
    lengths = {op.gate.index: len(op.path) for op in routed}
    # the globally shortest gate is always routed
    shortest = min(len(shortest_valid_path(g, lab.vertex[2 * k], lab.vertex[2 * k + 1])) for k in range(6))
    assert shortest in lengths.values()
    assert sorted([*lengths, *(x.index for x in left)]) == list(range(6))
    with pytest.raises(ValueError):
        vdp_subroutine(task, [IndexedGate(0, Gate.cnot(0, 1)), IndexedGate(1, Gate.cnot(1, 2))])


def test_factory_state():
    g = build_routing_graph("row", extent_for("row", 8), "color", FactoryConfig(2, 3))
    cold = FactoryState.initial(g)
    assert cold.available() == []
    for _ in range(3):
        cold.tick()
    assert cold.available() == sorted(g.factory_vertices)
    warm = FactoryState.initial(g, cold_start=False)
    f = warm.available()[0]
    warm.consume(f)
    warm.tick()
    assert f not in warm.available()
    warm.tick()
    warm.tick()
    assert f in warm.available()


def test_t_gates_wait_for_factories():
    g = build_routing_graph("row", extent_for("row", 4), "color", FactoryConfig(1, 3))
    circ = parse_circuit("qubits 4\nt 0\nt 1\nt 2\n")
    lab = Labeling(tuple(g.data_vertices[:4]))
    s = route_circuit(RoutingTask(g, lab, layer_circuit(circ)))
    used = [li for li, layer in enumerate(s.layers) for op in layer]
    assert used == [3, 6, 9]
    s = route_circuit(RoutingTask(g, lab, layer_circuit(circ), cold_start=False))
    assert [li for li, layer in enumerate(s.layers) for _ in layer] == [0, 3, 6]
    assert s.depth == 7


def test_errors():
    g = build_routing_graph("row", extent_for("row", 4), "color")
    lab = Labeling(tuple(g.data_vertices[:4]))
    with pytest.raises(NoFactories):
        route_circuit(RoutingTask(g, lab, layer_circuit(parse_circuit("qubits 4\nt 0\n"))))
    assert issubclass(UnroutableDemand, RoutingError)


def test_schedule_json_deterministic():
    g = build_routing_graph("hexagonal", extent_for("hexagonal", 8), "color", FactoryConfig(2, 1))
    inst_circ = parse_circuit("qubits 8\ncnot 0 1\ncnot 2 3\nt 4\ncnot 5 6\ncnot 1 2\n")
    lab = Labeling(tuple(g.data_vertices[:8]))
    a = route_circuit(RoutingTask(g, lab, layer_circuit(inst_circ))).to_json()
    b = route_circuit(RoutingTask(g, lab, layer_circuit(inst_circ))).to_json()
    assert a == b
    doc = json.loads(a)
    assert doc["depth"] == len(doc["layers"])
    assert all(op["ancilla"] == op["path"][1] for layer in doc["layers"] for op in layer)


@st.composite
def layered_with_leftovers(draw):
    q = draw(st.integers(2, 6))
    gates = []
    for _ in range(draw(st.integers(1, 15))):
        c, t = draw(st.lists(st.integers(0, q - 1), min_size=2, max_size=2, unique=True))
        gates.append(Gate.cnot(c, t))
    layered = layer_circuit(LogicalCircuit(q, tuple(gates)))
    i = draw(st.integers(0, layered.depth - 1))
    layer = list(layered.layers[i])
    left = draw(st.lists(st.sampled_from(layer), unique=True))
    return layered, i, left


@given(layered_with_leftovers())
def test_push_leftovers_preserves_order(case):
    layered, i, left = case
    layers = [list(x) for x in layered.layers]
    layers[i] = [g for g in layers[i] if g not in left]
    push_leftovers(layers, left, i + 1)
    pos = {g.index: k for k, layer in enumerate(layers) for g in layer}
    assert sorted(pos) == sorted(g.index for g in layered.gates())
    for layer in layers:
        qs = [q for g in layer for q in g.qubits]
        assert len(qs) == len(set(qs))
    gates = sorted(layered.gates(), key=lambda g: g.index)
    for a in gates:
        for b in gates:
            if a.index < b.index and set(a.qubits) & set(b.qubits):
                assert pos[a.index] < pos[b.index]
