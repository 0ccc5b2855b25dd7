"""Random (graph, circuit, labeling) instances for router property tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lscompile.circuit import Gate, LayeredCircuit, LogicalCircuit, layer_circuit
from lscompile.routing_graph import FactoryConfig, Labeling, RoutingGraph, build_routing_graph
from lscompile.router import RoutingTask


@dataclass
class Instance:
    task: RoutingTask
    circuit: LogicalCircuit

    @property
    def graph(self) -> RoutingGraph:
        return self.task.graph


def retyped(g: RoutingGraph, rng: np.random.Generator, substrate: str) -> RoutingGraph:
    """Same triangles and edges with random vertex types."""
    types = []
    for _ in range(g.num_vertices):
        u = rng.random()
        types.append("L" if u < 0.15 else "F" if u < 0.2 else "A")
    while types.count("L") < 2:
        types[int(rng.integers(len(types)))] = "L"
    return RoutingGraph(substrate, g.layout, g.extent, g.triangles, types, [list(a) for a in g.adjacency],
                        dict(g.direction), g.reset_period)


def random_circuit(rng: np.random.Generator, q: int, n_gates: int, cnot_ratio: float) -> LogicalCircuit:
    gates = []
    for _ in range(n_gates):
        if q < 2 or rng.random() >= cnot_ratio:
            gates.append(Gate.t(int(rng.integers(q))))
        else:
            c, t = rng.choice(q, size=2, replace=False)
            gates.append(Gate.cnot(int(c), int(t)))
    return LogicalCircuit(q, tuple(gates))


def random_instance(seed: int, small: bool | None = None) -> Instance:
    """A random routing instance; ``small`` instances have at most 50 vertices."""
    rng = np.random.default_rng([7, seed])
    if small is None:
        small = bool(rng.integers(2))
    layout = str(rng.choice(["hexagonal", "row", "pair"]))
    reset = int(rng.integers(1, 5))
    if small:
        size = int(rng.integers(4, 6))
        base = build_routing_graph(layout, (size, size), "color", FactoryConfig(0, reset))
        g = retyped(base, rng, str(rng.choice(["color", "surface"])))
    else:
        substrate = str(rng.choice(["color", "surface"]))
        if substrate == "surface":
            layout = "pair"
        size = int(rng.integers(6, 9))
        f = int(rng.integers(0, 4))
        g = build_routing_graph(layout, (size, size), substrate, FactoryConfig(f, reset))
    data = g.data_vertices
    q = int(rng.integers(min(2, len(data)), len(data) + 1))
    ratio = 1.0 if not g.factory_vertices else float(rng.choice([0.5, 0.8, 1.0]))
    circuit = random_circuit(rng, q, int(rng.integers(1, (q + 3 if small else 4 * q + 2))), ratio)
    perm = rng.permutation(len(data))[:q]
    lab = Labeling(tuple(data[int(k)] for k in perm))
    task = RoutingTask(g, lab, layer_circuit(circuit), reset, bool(rng.integers(2)))
    return Instance(task, circuit)


def schedule_violations(inst: Instance, schedule) -> list[str]:
    """All violated schedule invariants (empty when the schedule is correct)."""
    from lscompile.routing_graph import is_valid_path

    g, lab, layered = inst.graph, inst.task.labeling.vertex, inst.task.layered
    period = g.reset_period if inst.task.reset_period is None else inst.task.reset_period
    out = []
    layer_of = {}
    uses: dict[int, list[int]] = {}
    for li, layer in enumerate(schedule.layers):
        seen: set[int] = set()
        for op in layer:
            if seen & set(op.path):
                out.append(f"layer {li}: paths share a vertex")
            seen |= set(op.path)
            if op.gate.index in layer_of:
                out.append(f"gate {op.gate.index} routed twice")
            layer_of[op.gate.index] = li
            if not is_valid_path(g, list(op.path)):
                out.append(f"gate {op.gate.index}: invalid path")
            gate = op.gate.gate
            if gate.kind == "CNOT":
                if (op.path[0], op.path[-1]) != (lab[gate.control], lab[gate.target]) or op.factory is not None:
                    out.append(f"gate {op.gate.index}: wrong endpoints")
            else:
                if op.path[0] != lab[gate.target] or op.path[-1] != op.factory or op.factory not in g.factory_vertices:
                    out.append(f"gate {op.gate.index}: wrong T endpoints")
                uses.setdefault(op.factory, []).append(li)
    if sorted(layer_of) != list(range(len(inst.circuit.gates))):
        out.append("gate multiset differs")
        return out
    gates = inst.circuit.gates
    last: dict[int, int] = {}
    for i, gate in enumerate(gates):
        for q in gate.qubits:
            if q in last and layer_of[last[q]] >= layer_of[i]:
                out.append(f"qubit {q}: order of gates {last[q]} and {i} violated")
            last[q] = i
    if schedule.depth < layered.depth:
        out.append("depth below the circuit depth")
    for f, layers in uses.items():
        if inst.task.cold_start and layers[0] < period:
            out.append(f"factory {f} used before its first state is ready")
        if any(b - a < period for a, b in zip(layers, layers[1:])):
            out.append(f"factory {f} reused within the reset period")
    return out
