"""Hill climbing over qubit placements with random restarts.

Two cost functions are available: the number of crossings of empty-graph shortest
paths per layer (cheap heuristic) and the depth of the routed schedule (exact). A
neighbor of a placement swaps the vertices of two labels that occur in the circuit.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Literal

import numpy as np

from . import kernels
from .circuit import LayeredCircuit
from .router import NoFactories, RoutingTask, route_circuit, shortest_valid_path
from .routing_graph import Labeling, RoutingGraph, random_labeling

MetricKind = Literal["crossings", "depth"]
Denominator = Literal["final", "initial"]
METRICS: tuple[MetricKind, ...] = ("crossings", "depth")


@dataclass(frozen=True)
class HillClimbConfig:
    """Hill climbing budget.

    Attributes:
        restarts: Number of random initial placements.
        max_iterations: Neighborhood sweeps per restart.
        metric: Cost function.
        rng_seed: Seed; restart ``k`` draws its placement from ``(rng_seed, k)``.
    """

    restarts: int = 10
    max_iterations: int = 50
    metric: MetricKind = "crossings"
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.restarts < 1:
            msg = "At least one restart is required."
            raise ValueError(msg)
        if self.max_iterations < 1:
            msg = "At least one iteration is required."
            raise ValueError(msg)
        if self.metric not in METRICS:
            msg = f"Unknown metric {self.metric!r}."
            raise ValueError(msg)


@dataclass(frozen=True)
class RestartTrace:
    """Cost after every accepted move of one restart (first entry: initial cost)."""

    initial: Labeling
    costs: tuple[int, ...]
    final: Labeling


@dataclass(frozen=True)
class MappingResult:
    """Outcome of :func:`hill_climb`.

    Attributes:
        labeling: Best placement over all restarts.
        cost: Its metric value.
        metric: Metric used.
        traces: Per-restart cost traces.
        best_restart: Restart that produced ``labeling``.
        initial_depth: Routed depth of that restart's initial placement.
        final_depth: Routed depth of ``labeling``.
    """

    labeling: Labeling
    cost: int
    metric: MetricKind
    traces: tuple[RestartTrace, ...]
    best_restart: int
    initial_depth: int
    final_depth: int
    denominator: Denominator = "final"
    extra: dict = field(default_factory=dict)

    @property
    def initial_costs(self) -> tuple[int, ...]:
        return tuple(t.costs[0] for t in self.traces)

    @property
    def improvement(self) -> Fraction:
        return improvement(self.initial_depth, self.final_depth, self.denominator)

    def to_json(self) -> str:
        doc = {
            "labeling": {str(q): v for q, v in enumerate(self.labeling.vertex)},
            "metric": self.metric,
            "cost": self.cost,
            "best_restart": self.best_restart,
            "traces": [list(t.costs) for t in self.traces],
            "delta_i": self.initial_depth,
            "delta_f": self.final_depth,
            "improvement": float(self.improvement),
            "denominator": self.denominator,
        }
        return json.dumps(doc, sort_keys=True)


def improvement(delta_i: int, delta_f: int, denominator: Denominator = "final") -> Fraction:
    """Relative depth reduction ``(delta_i - delta_f)`` over ``delta_f`` or ``delta_i``.

    Raises:
        ZeroDivisionError: If the selected denominator is zero.
    """
    base = delta_f if denominator == "final" else delta_i
    if denominator not in ("final", "initial"):
        msg = f"Unknown denominator {denominator!r}."
        raise ValueError(msg)
    if base == 0:
        msg = "Improvement is undefined for a zero-depth denominator."
        raise ZeroDivisionError(msg)
    return Fraction(delta_i - delta_f, base)


def crossing_cost(g: RoutingGraph, layered: LayeredCircuit, labeling: Labeling) -> int:
    """Sum over layers and ancilla vertices of ``K choose 2``.

    ``K`` counts the empty-graph shortest valid paths of the layer's CNOTs that pass
    through the vertex; T gates are ignored.
    """
    total = 0
    for layer in layered.layers:
        count: Counter[int] = Counter()
        for ig in layer:
            if ig.gate.kind != "CNOT":
                continue
            path = shortest_valid_path(g, labeling.vertex[ig.gate.control], labeling.vertex[ig.gate.target])
            if path is not None:
                count.update(path[1:-1])
        total += sum(k * (k - 1) // 2 for k in count.values())
    return total


def depth_cost(
    g: RoutingGraph, layered: LayeredCircuit, labeling: Labeling, reset_period: int | None = None,
    cold_start: bool = True,
) -> int:
    """Depth of the routed schedule."""
    return route_circuit(RoutingTask(g, labeling, layered, reset_period, cold_start)).depth


def neighbors(labeling: Labeling, layered: LayeredCircuit) -> list[Labeling]:
    """Placements that swap the vertices of two labels occurring in the circuit."""
    return [labeling.swapped(a, b) for a, b in combinations(layered.active_labels(), 2)]


class _Evaluator:
    """Metric evaluation, compiled for the color substrate and pure Python otherwise."""

    def __init__(self, g: RoutingGraph, layered: LayeredCircuit, metric: MetricKind, reset_period: int,
                 cold_start: bool) -> None:
        self.g = g
        self.layered = layered
        self.metric = metric
        self.reset_period = reset_period
        self.cold_start = cold_start
        self.fast = g.substrate == "color"
        if self.fast:
            self.circ = kernels.circuit_arrays(layered)

    def cost(self, lab: Labeling) -> int:
        if self.fast:
            arr = np.array(lab.vertex, dtype=np.int64)
            if self.metric == "crossings":
                return kernels.crossings(self.g, self.circ, arr)
            return kernels.route_depth(self.g, self.circ, arr, self.reset_period, self.cold_start)[0]
        if self.metric == "crossings":
            return crossing_cost(self.g, self.layered, lab)
        return depth_cost(self.g, self.layered, lab, self.reset_period, self.cold_start)

    def depth(self, lab: Labeling) -> int:
        if self.fast:
            arr = np.array(lab.vertex, dtype=np.int64)
            return kernels.route_depth(self.g, self.circ, arr, self.reset_period, self.cold_start)[0]
        return depth_cost(self.g, self.layered, lab, self.reset_period, self.cold_start)

    def best_neighbor(self, lab: Labeling, below: int | None = None) -> tuple[int, Labeling] | None:
        """Lowest-cost neighbor; ties go to the lexicographically smallest placement.

        With ``below`` only neighbors cheaper than ``below`` are guaranteed exact; any
        other result merely signals that no such neighbor exists.
        """
        if self.fast:
            arr = np.array(lab.vertex, dtype=np.int64)
            bound = None if below is None else max(below - 1, 0)
            c, a, b = kernels.best_swap(self.g, self.circ, arr, self.metric, self.reset_period, self.cold_start,
                                        bound)
            return None if a < 0 else (c, lab.swapped(a, b))
        best = None
        for nb in neighbors(lab, self.layered):
            c = self.cost(nb)
            if best is None or (c, nb.vertex) < (best[0], best[1].vertex):
                best = (c, nb)
        return best


def hill_climb(
    g: RoutingGraph,
    layered: LayeredCircuit,
    config: HillClimbConfig | None = None,
    reset_period: int | None = None,
    cold_start: bool = True,
    denominator: Denominator = "final",
) -> MappingResult:
    """Optimize the placement by steepest-descent hill climbing with random restarts.

    Each restart draws a random placement, then repeatedly moves to the best neighbor
    while that is a strict improvement, for at most ``max_iterations`` sweeps. The best
    final placement over all restarts is returned (ties: earliest restart).
    """
    config = config or HillClimbConfig()
    if not g.factory_vertices and any(ig.gate.kind == "T" for ig in layered.gates()):
        msg = "The circuit contains T gates but there are no factories."
        raise NoFactories(msg)
    period = g.reset_period if reset_period is None else reset_period
    ev = _Evaluator(g, layered, config.metric, period, cold_start)
    traces = []
    best: tuple[int, int] | None = None
    for r in range(config.restarts):
        rng = np.random.default_rng([config.rng_seed, r])
        start = random_labeling(g, layered.num_qubits, rng)
        cur, cost = start, ev.cost(start)
        costs = [cost]
        for _ in range(config.max_iterations):
            nb = ev.best_neighbor(cur, below=cost)
            if nb is None or nb[0] >= cost:
                break
            cost, cur = nb
            costs.append(cost)
        traces.append(RestartTrace(start, tuple(costs), cur))
        if best is None or cost < best[0]:
            best = (cost, r)
    assert best is not None
    chosen = traces[best[1]]
    return MappingResult(
        labeling=chosen.final,
        cost=best[0],
        metric=config.metric,
        traces=tuple(traces),
        best_restart=best[1],
        initial_depth=ev.depth(chosen.initial),
        final_depth=ev.depth(chosen.final),
        denominator=denominator,
    )
