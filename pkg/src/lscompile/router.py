"""Shortest-first vertex-disjoint path routing of layered CNOT+T circuits.

Each layer of the circuit is routed by repeatedly adding the globally shortest valid
path among all unrouted gates and removing its vertices from the graph. Gates that
cannot be routed are pushed into the next layer, moving later gates on the same qubits
along with them. T gates are routed to a magic-state factory whose countdown has run
out; a consumed factory restarts its countdown at the reset period and all countdowns
decrease by one after every routed layer.
"""

from __future__ import annotations

import json
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .circuit import IndexedGate, LayeredCircuit
from .routing_graph import ALL_DIRS, Labeling, RoutingGraph


class RoutingError(RuntimeError):
    """Base class of routing failures."""


class NoFactories(RoutingError):
    """The circuit contains T gates but the graph has no factory."""


class UnroutableDemand(RoutingError):
    """A gate has no valid path even on the empty graph."""


@dataclass(frozen=True)
class RoutedOp:
    """A gate together with its path.

    Attributes:
        gate: The gate and its source index.
        path: Vertex ids from the control (or T target) to the target (or factory).
        factory: Factory vertex consumed by a T gate.
    """

    gate: IndexedGate
    path: tuple[int, ...]
    factory: int | None = None

    @property
    def ancilla(self) -> int:
        """Interior vertex hosting the logical ancilla patch."""
        return self.path[1]


@dataclass(frozen=True)
class CompiledSchedule:
    """Layers of vertex-disjoint routed operations."""

    layers: tuple[tuple[RoutedOp, ...], ...]

    @property
    def depth(self) -> int:
        return len(self.layers)

    def to_json(self) -> str:
        layers = []
        for layer in self.layers:
            ops = []
            for op in layer:
                g = op.gate.gate
                ops.append({
                    "gate": op.gate.index,
                    "control": g.control,
                    "target": g.target,
                    "path": list(op.path),
                    "ancilla": op.ancilla,
                    "factory": op.factory,
                })
            layers.append(ops)
        return json.dumps({"depth": self.depth, "layers": layers}, sort_keys=True)


def _distances(g: RoutingGraph, targets: Iterable[int], blocked: set[int] | frozenset[int]) -> list[int]:
    """Edge distances from every free ancilla to the nearest target (via ancillas).

    Distance 1 means the ancilla is adjacent to a target.
    """
    inf = 1 << 30
    dist = [inf] * g.num_vertices
    queue: deque[int] = deque()
    is_anc = g.is_ancilla
    adj = g.adjacency
    for t in targets:
        for a in adj[t]:
            if is_anc[a] and a not in blocked and dist[a] > 1:
                dist[a] = 1
                queue.append(a)
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in adj[u]:
            if is_anc[w] and dist[w] > du and w not in blocked:
                dist[w] = du
                queue.append(w)
    return dist


def _color_path(g: RoutingGraph, src: int, targets: Sequence[int], blocked) -> list[int] | None:
    dist = _distances(g, targets, blocked)
    adj = g.adjacency
    best = min((dist[a] for a in adj[src]), default=1 << 30)
    if best >= 1 << 30:
        return None
    path = [src]
    cur = src
    need = best
    while need > 0:
        cur = next(a for a in adj[cur] if dist[a] == need and (need > 0))
        path.append(cur)
        need -= 1
        if need == 0:
            break
    tset = set(targets)
    path.append(next(t for t in adj[cur] if t in tset))
    return path


def _state_distances(g: RoutingGraph, targets: Sequence[int], blocked) -> list[list[int]]:
    """Remaining edges to a target with all three directions covered.

    ``h[v][mask]`` is the length of the shortest walk from free ancilla ``v``, with
    ``mask`` already covered, that ends at a target and completes the direction set.
    """
    inf = 1 << 30
    n = g.num_vertices
    h = [[inf] * 8 for _ in range(n)]
    is_anc = g.is_ancilla
    adj = g.adjacency
    direction = g.direction
    queue: deque[tuple[int, int]] = deque()
    for t in targets:
        for a in adj[t]:
            if not is_anc[a] or a in blocked:
                continue
            e = direction[(a, t)]
            for m in range(8):
                if m | e == ALL_DIRS and h[a][m] > 1:
                    h[a][m] = 1
                    queue.append((a, m))
    while queue:
        w, mw = queue.popleft()
        dw = h[w][mw] + 1
        for v in adj[w]:
            if not is_anc[v] or v in blocked:
                continue
            e = direction[(v, w)]
            if e & ~mw:
                continue
            for m in (mw, mw & ~e):
                if m | e == mw and h[v][m] > dw:
                    h[v][m] = dw
                    queue.append((v, m))
    return h


def _surface_path(g: RoutingGraph, src: int, targets: Sequence[int], blocked) -> list[int] | None:
    """Shortest simple path covering all three directions, lexicographically smallest."""
    inf = 1 << 30
    h = _state_distances(g, targets, blocked)
    adj = g.adjacency
    direction = g.direction
    tset = set(targets)
    bound = min((1 + h[a][direction[(src, a)]] for a in adj[src] if h[a][direction[(src, a)]] < inf), default=inf)
    if bound >= inf:
        return None
    limit = 1 + sum(1 for v in range(g.num_vertices) if g.is_ancilla[v] and v not in blocked)
    while bound <= limit:
        path = [src]
        on_path = {src}

        def dfs(u: int, mask: int, used: int) -> bool:
            for w in adj[u]:
                m = mask | direction[(u, w)]
                if w in tset:
                    if m == ALL_DIRS and used + 1 == bound and len(path) >= 2:
                        path.append(w)
                        return True
                    continue
                if w in on_path or h[w][m] >= inf or used + 1 + h[w][m] > bound:
                    continue
                path.append(w)
                on_path.add(w)
                if dfs(w, m, used + 1):
                    return True
                path.pop()
                on_path.discard(w)
            return False

        if dfs(src, 0, 0):
            return path
        bound += 1
    return None


def shortest_valid_path(
    g: RoutingGraph, src: int, dst: int | Sequence[int], occupied: Iterable[int] = ()
) -> list[int] | None:
    """Shortest valid path from ``src`` to ``dst`` (or to the closest of several targets).

    Interior vertices are unoccupied ancillas; ties are broken by the lexicographically
    smallest vertex sequence. Returns None when no valid path exists.
    """
    targets = [dst] if isinstance(dst, int) else sorted(dst)
    blocked = set(occupied)
    if src in blocked:
        return None
    targets = [t for t in targets if t != src and t not in blocked]
    if not targets:
        return None
    if g.substrate == "color":
        return _color_path(g, src, targets, blocked)
    return _surface_path(g, src, targets, blocked)


@dataclass
class FactoryState:
    """Countdown per factory vertex; a factory is available when its value is <= 0."""

    countdown: dict[int, int]
    reset_period: int

    @classmethod
    def initial(cls, g: RoutingGraph, reset_period: int | None = None, cold_start: bool = True) -> FactoryState:
        period = g.reset_period if reset_period is None else reset_period
        start = period if cold_start else 0
        return cls({f: start for f in g.factory_vertices}, period)

    def available(self) -> list[int]:
        return sorted(f for f, c in self.countdown.items() if c <= 0)

    def consume(self, f: int) -> None:
        self.countdown[f] = self.reset_period

    def tick(self) -> None:
        for f in self.countdown:
            self.countdown[f] -= 1


class _Router:
    """Routing state for one graph and labeling, with cached empty-graph paths."""

    def __init__(self, g: RoutingGraph, labeling: Labeling) -> None:
        self.g = g
        self.labeling = labeling
        self._pair_cache: dict[tuple[int, int], list[int] | None] = {}

    def pair_path(self, a: int, b: int, blocked) -> list[int] | None:
        if not blocked:
            key = (a, b)
            if key not in self._pair_cache:
                self._pair_cache[key] = shortest_valid_path(self.g, a, b)
            return self._pair_cache[key]
        return shortest_valid_path(self.g, a, b, blocked)

    def candidate(self, gate: IndexedGate, blocked, factories: FactoryState) -> tuple[list[int], int | None] | None:
        vertex = self.labeling.vertex
        if gate.gate.kind == "CNOT":
            path = self.pair_path(vertex[gate.gate.control], vertex[gate.gate.target], blocked)
            return None if path is None else (path, None)
        avail = [f for f in factories.available() if f not in blocked]
        if not avail:
            return None
        path = shortest_valid_path(self.g, vertex[gate.gate.target], avail, blocked)
        return None if path is None else (path, path[-1])

    def check_routable(self, gates: Iterable[IndexedGate]) -> None:
        for gate in gates:
            vertex = self.labeling.vertex
            if gate.gate.kind == "CNOT":
                ok = self.pair_path(vertex[gate.gate.control], vertex[gate.gate.target], frozenset()) is not None
            else:
                if not self.g.factory_vertices:
                    msg = "The circuit contains T gates but there are no factories."
                    raise NoFactories(msg)
                ok = shortest_valid_path(self.g, vertex[gate.gate.target], self.g.factory_vertices) is not None
            if not ok:
                msg = f"Gate {gate.index} ({gate.gate}) has no valid path on the empty graph."
                raise UnroutableDemand(msg)

    def subroutine(
        self, demand: Sequence[IndexedGate], factories: FactoryState
    ) -> tuple[list[RoutedOp], list[IndexedGate]]:
        blocked: set[int] = set()
        cands: dict[int, tuple[list[int], int | None] | None] = {}
        pending = {g.index: g for g in demand}
        routed: list[RoutedOp] = []
        for idx, gate in pending.items():
            cands[idx] = self.candidate(gate, blocked, factories)
        while True:
            best = None
            for idx in sorted(pending):
                c = cands[idx]
                if c is not None and (best is None or len(c[0]) < len(cands[best][0])):
                    best = idx
            if best is None:
                break
            path, fac = cands[best]
            gate = pending.pop(best)
            del cands[best]
            routed.append(RoutedOp(gate, tuple(path), fac))
            if fac is not None:
                factories.consume(fac)
            newly = set(path)
            blocked |= newly
            for idx, gate2 in pending.items():
                c = cands[idx]
                if c is None:
                    continue
                if newly.intersection(c[0]) or (fac is not None and c[1] is not None):
                    cands[idx] = self.candidate(gate2, blocked, factories)
        factories.tick()
        routed.sort(key=lambda op: op.gate.index)
        leftovers = sorted(pending.values(), key=lambda g: g.index)
        return routed, leftovers


@dataclass
class RoutingTask:
    """Inputs of :func:`route_circuit`.

    Attributes:
        graph: Routing graph.
        labeling: Placement of the qubits.
        layered: Layered circuit.
        reset_period: Overrides the graph's factory reset period.
        cold_start: Start factory countdowns at the reset period (otherwise at zero).
    """

    graph: RoutingGraph
    labeling: Labeling
    layered: LayeredCircuit
    reset_period: int | None = None
    cold_start: bool = True


def vdp_subroutine(
    task: RoutingTask, demand: Sequence[IndexedGate], factories: FactoryState | None = None
) -> tuple[list[RoutedOp], list[IndexedGate]]:
    """Route one layer shortest-first; returns the routed layer and the leftovers.

    ``factories`` is updated in place (consumptions and the end-of-layer tick).
    """
    labels = [q for g in demand for q in g.qubits]
    if len(labels) != len(set(labels)):
        msg = "Demand gates must act on disjoint qubits."
        raise ValueError(msg)
    if factories is None:
        factories = FactoryState.initial(task.graph, task.reset_period, task.cold_start)
    return _Router(task.graph, task.labeling).subroutine(demand, factories)


def push_leftovers(
    layers: list[list[IndexedGate]], leftovers: Sequence[IndexedGate], position: int
) -> list[list[IndexedGate]]:
    """Insert leftovers at ``layers[position]``, pushing conflicting gates onward.

    Gates of a layer that share a qubit with gates carried into it move to the next
    layer, recursively, so the per-qubit gate order is preserved. Modifies and returns
    ``layers``.
    """
    carry = sorted(leftovers, key=lambda g: g.index)
    p = position
    while carry:
        if p == len(layers):
            layers.append([])
        busy = {q for g in carry for q in g.qubits}
        stay, move = [], []
        for g in layers[p]:
            (move if busy.intersection(g.qubits) else stay).append(g)
        layers[p] = sorted(carry + stay, key=lambda g: g.index)
        carry = move
        p += 1
    return layers


def route_circuit(task: RoutingTask) -> CompiledSchedule:
    """Route a layered circuit into a schedule of vertex-disjoint layers.

    Raises:
        NoFactories: If T gates are present but the graph has no factory.
        UnroutableDemand: If some gate has no valid path even on the empty graph.
    """
    router = _Router(task.graph, task.labeling)
    layers = [list(layer) for layer in task.layered.layers]
    router.check_routable(g for layer in layers for g in layer)
    factories = FactoryState.initial(task.graph, task.reset_period, task.cold_start)
    out: list[tuple[RoutedOp, ...]] = []
    i = 0
    while i < len(layers):
        routed, leftovers = router.subroutine(layers[i], factories)
        out.append(tuple(routed))
        if leftovers:
            push_leftovers(layers, leftovers, i + 1)
        i += 1
    return CompiledSchedule(tuple(out))
