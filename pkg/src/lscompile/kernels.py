"""Compiled inner loops for routing and hill climbing on the color substrate.

The kernels mirror :mod:`lscompile.router` and :func:`lscompile.mapper.crossing_cost`
step by step (same tie-breaks, same candidate recomputation rule, same factory model),
so they return identical results; the pure-Python versions remain the reference
implementation and the tests compare both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .circuit import LayeredCircuit
from .router import NoFactories, UnroutableDemand, shortest_valid_path
from .routing_graph import RoutingGraph

INF = 1 << 30
NO_FACTORIES = -1
UNROUTABLE = -2
NO_BOUND = 1 << 62


@dataclass(frozen=True)
class GraphArrays:
    """CSR adjacency and vertex data of a routing graph."""

    indptr: np.ndarray
    indices: np.ndarray
    is_anc: np.ndarray
    factories: np.ndarray
    data_index: np.ndarray
    pair_paths: np.ndarray
    pair_lengths: np.ndarray
    factory_reach: np.ndarray


@dataclass(frozen=True)
class CircuitArrays:
    """Gates in index order with their initial layer."""

    kind: np.ndarray
    control: np.ndarray
    target: np.ndarray
    layer: np.ndarray
    cnot_layer_start: np.ndarray
    cnot_control: np.ndarray
    cnot_target: np.ndarray
    active: np.ndarray
    num_qubits: int


def graph_arrays(g: RoutingGraph) -> GraphArrays:
    """Array form of ``g`` including empty-graph paths between all data vertices (cached)."""
    cached = g.__dict__.get("_arrays")
    if cached is not None:
        return cached
    n = g.num_vertices
    indptr = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        indptr[v + 1] = indptr[v] + len(g.adjacency[v])
    indices = np.array([w for nb in g.adjacency for w in nb], dtype=np.int64)
    data = g.data_vertices
    data_index = np.full(n, -1, dtype=np.int64)
    for k, v in enumerate(data):
        data_index[v] = k
    nd = len(data)
    pair_paths = np.zeros((nd, nd, n + 1), dtype=np.int64)
    pair_lengths = np.zeros((nd, nd), dtype=np.int64)
    if g.substrate == "color":
        for a in range(nd):
            for b in range(nd):
                if a == b:
                    continue
                path = shortest_valid_path(g, data[a], data[b])
                if path is not None:
                    pair_lengths[a, b] = len(path)
                    pair_paths[a, b, : len(path)] = path
    factory_reach = np.zeros(n, dtype=np.bool_)
    if g.factory_vertices:
        for v in data:
            factory_reach[v] = shortest_valid_path(g, v, g.factory_vertices) is not None
    arrays = GraphArrays(
        indptr,
        indices,
        np.asarray(g.is_ancilla, dtype=np.bool_),
        np.array(sorted(g.factory_vertices), dtype=np.int64),
        data_index,
        pair_paths,
        pair_lengths,
        factory_reach,
    )
    g.__dict__["_arrays"] = arrays
    return arrays


def circuit_arrays(layered: LayeredCircuit) -> CircuitArrays:
    """Array form of a layered circuit; gate ``k`` is the ``k``-th gate by source index."""
    pairs = sorted(((ig.index, li, ig.gate) for li, layer in enumerate(layered.layers) for ig in layer),
                   key=lambda x: x[0])
    kind = np.array([0 if gate.kind == "CNOT" else 1 for _, _, gate in pairs], dtype=np.int64)
    control = np.array([gate.control if gate.kind == "CNOT" else -1 for _, _, gate in pairs], dtype=np.int64)
    target = np.array([gate.target for _, _, gate in pairs], dtype=np.int64)
    layer = np.array([li for _, li, _ in pairs], dtype=np.int64)
    starts = [0]
    cc: list[int] = []
    ct: list[int] = []
    for lay in layered.layers:
        for ig in sorted(lay, key=lambda x: x.index):
            if ig.gate.kind == "CNOT":
                cc.append(ig.gate.control)
                ct.append(ig.gate.target)
        starts.append(len(cc))
    return CircuitArrays(
        kind,
        control,
        target,
        layer,
        np.array(starts, dtype=np.int64),
        np.array(cc, dtype=np.int64),
        np.array(ct, dtype=np.int64),
        np.array(layered.active_labels(), dtype=np.int64),
        layered.num_qubits,
    )


@njit(cache=True)
def _bfs(indptr, indices, is_anc, blocked, targets, ntargets, src, dist, queue):
    """Distances to the nearest target over free ancillas (see router._distances)."""
    n = dist.shape[0]
    for v in range(n):
        dist[v] = INF
    head = 0
    tail = 0
    for k in range(ntargets):
        t = targets[k]
        if t == src or blocked[t]:
            continue
        for e in range(indptr[t], indptr[t + 1]):
            a = indices[e]
            if is_anc[a] and not blocked[a] and dist[a] > 1:
                dist[a] = 1
                queue[tail] = a
                tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for e in range(indptr[u], indptr[u + 1]):
            w = indices[e]
            if is_anc[w] and dist[w] > du and not blocked[w]:
                dist[w] = du
                queue[tail] = w
                tail += 1


@njit(cache=True)
def _color_path(indptr, indices, is_anc, blocked, targets, ntargets, src, dist, queue, tmark, out):
    """Lexicographically smallest shortest valid path; returns its vertex count or 0."""
    if blocked[src]:
        return 0
    _bfs(indptr, indices, is_anc, blocked, targets, ntargets, src, dist, queue)
    best = INF
    for e in range(indptr[src], indptr[src + 1]):
        if dist[indices[e]] < best:
            best = dist[indices[e]]
    if best >= INF:
        return 0
    out[0] = src
    length = 1
    cur = src
    need = best
    while need > 0:
        for e in range(indptr[cur], indptr[cur + 1]):
            a = indices[e]
            if dist[a] == need:
                cur = a
                break
        out[length] = cur
        length += 1
        need -= 1
    for k in range(ntargets):
        t = targets[k]
        if t != src and not blocked[t]:
            tmark[t] = True
    for e in range(indptr[cur], indptr[cur + 1]):
        t = indices[e]
        if tmark[t]:
            out[length] = t
            length += 1
            break
    for k in range(ntargets):
        tmark[targets[k]] = False
    return length


@njit(cache=True)
def _route(indptr, indices, is_anc, factories, reset, cold, kind, control, target, init_layer, lab,
           data_index, pair_paths, pair_lengths, factory_reach, out_layer, out_factory, bound):
    """Shortest-first routing with pushing; returns the depth (see router.route_circuit).

    Routing stops early and returns ``bound + 1`` once the depth is known to exceed
    ``bound``; the outputs are then incomplete.
    """
    n = is_anc.shape[0]
    ng = kind.shape[0]
    nf = factories.shape[0]
    layer = init_layer.copy()
    countdown = np.full(nf, reset if cold else 0, dtype=np.int64)
    blocked = np.zeros(n, dtype=np.bool_)
    newmark = np.zeros(n, dtype=np.bool_)
    tmark = np.zeros(n, dtype=np.bool_)
    dist = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    targets = np.empty(max(nf, 1), dtype=np.int64)
    pending = np.empty(ng, dtype=np.int64)
    cand_len = np.zeros(ng, dtype=np.int64)
    cand_fac = np.full(ng, -1, dtype=np.int64)
    cand_path = np.zeros((ng, n + 1), dtype=np.int64)
    alive = np.zeros(ng, dtype=np.bool_)
    carry = np.zeros(ng, dtype=np.bool_)
    busy = np.zeros(lab.shape[0], dtype=np.bool_)
    for k in range(ng):
        out_factory[k] = -1
        if kind[k] == 0:
            if pair_lengths[data_index[lab[control[k]]], data_index[lab[target[k]]]] == 0:
                return UNROUTABLE
        elif nf == 0:
            return NO_FACTORIES
        elif not factory_reach[lab[target[k]]]:
            return UNROUTABLE
    i = 0
    while True:
        m = 0
        for k in range(ng):
            if layer[k] == i:
                pending[m] = k
                m += 1
        if m == 0:
            remaining = False
            for k in range(ng):
                if layer[k] > i:
                    remaining = True
            if not remaining:
                break
        if i >= bound:
            return bound + 1
        for v in range(n):
            blocked[v] = False
        for p in range(m):
            alive[p] = True
            k = pending[p]
            cand_len[p] = 0
            cand_fac[p] = -1
            if kind[k] == 0:
                a = data_index[lab[control[k]]]
                b = data_index[lab[target[k]]]
                cand_len[p] = pair_lengths[a, b]
                for s in range(cand_len[p]):
                    cand_path[p, s] = pair_paths[a, b, s]
            else:
                nt = 0
                for f in range(nf):
                    if countdown[f] <= 0 and not blocked[factories[f]]:
                        targets[nt] = factories[f]
                        nt += 1
                if nt > 0:
                    cand_len[p] = _color_path(indptr, indices, is_anc, blocked, targets, nt, lab[target[k]],
                                              dist, queue, tmark, cand_path[p])
                    if cand_len[p] > 0:
                        cand_fac[p] = cand_path[p, cand_len[p] - 1]
        while True:
            best = -1
            for p in range(m):
                if alive[p] and cand_len[p] > 0 and (best < 0 or cand_len[p] < cand_len[best]):
                    best = p
            if best < 0:
                break
            alive[best] = False
            k = pending[best]
            out_layer[k] = i
            fac = cand_fac[best]
            if fac >= 0:
                out_factory[k] = fac
                for f in range(nf):
                    if factories[f] == fac:
                        countdown[f] = reset
            for s in range(cand_len[best]):
                v = cand_path[best, s]
                blocked[v] = True
                newmark[v] = True
            for p in range(m):
                if not alive[p] or cand_len[p] == 0:
                    continue
                hit = fac >= 0 and cand_fac[p] >= 0
                if not hit:
                    for s in range(cand_len[p]):
                        if newmark[cand_path[p, s]]:
                            hit = True
                            break
                if not hit:
                    continue
                k2 = pending[p]
                cand_len[p] = 0
                cand_fac[p] = -1
                if kind[k2] == 0:
                    targets[0] = lab[target[k2]]
                    cand_len[p] = _color_path(indptr, indices, is_anc, blocked, targets, 1, lab[control[k2]],
                                              dist, queue, tmark, cand_path[p])
                else:
                    nt = 0
                    for f in range(nf):
                        if countdown[f] <= 0 and not blocked[factories[f]]:
                            targets[nt] = factories[f]
                            nt += 1
                    if nt > 0:
                        cand_len[p] = _color_path(indptr, indices, is_anc, blocked, targets, nt, lab[target[k2]],
                                                  dist, queue, tmark, cand_path[p])
                        if cand_len[p] > 0:
                            cand_fac[p] = cand_path[p, cand_len[p] - 1]
            for s in range(cand_len[best]):
                newmark[cand_path[best, s]] = False
        for f in range(nf):
            countdown[f] -= 1
        any_left = False
        for k in range(ng):
            carry[k] = False
        for p in range(m):
            if alive[p]:
                carry[pending[p]] = True
                any_left = True
        pos = i + 1
        while any_left:
            for q in range(busy.shape[0]):
                busy[q] = False
            for k in range(ng):
                if carry[k]:
                    layer[k] = pos
                    busy[target[k]] = True
                    if kind[k] == 0:
                        busy[control[k]] = True
            any_left = False
            for k in range(ng):
                nxt = False
                if not carry[k] and layer[k] == pos:
                    if busy[target[k]] or (kind[k] == 0 and busy[control[k]]):
                        nxt = True
                carry[k] = nxt
                if nxt:
                    any_left = True
            pos += 1
        i += 1
    return i


@njit(cache=True)
def _crossings(pair_paths, pair_lengths, data_index, starts, cc, ct, lab, count):
    """Sum over layers and ancillas of K choose 2 for empty-graph shortest paths."""
    total = 0
    for li in range(starts.shape[0] - 1):
        for k in range(starts[li], starts[li + 1]):
            a = data_index[lab[cc[k]]]
            b = data_index[lab[ct[k]]]
            for s in range(1, pair_lengths[a, b] - 1):
                v = pair_paths[a, b, s]
                total += count[v]
                count[v] += 1
        for k in range(starts[li], starts[li + 1]):
            a = data_index[lab[cc[k]]]
            b = data_index[lab[ct[k]]]
            for s in range(1, pair_lengths[a, b] - 1):
                count[pair_paths[a, b, s]] = 0
    return total


@njit(cache=True)
def _lex_less(lab, a1, b1, a2, b2):
    """Whether ``lab`` with (a1, b1) swapped is lexicographically below ``lab`` with (a2, b2) swapped."""
    for q in range(lab.shape[0]):
        x = lab[q]
        if q == a1:
            x = lab[b1]
        elif q == b1:
            x = lab[a1]
        y = lab[q]
        if q == a2:
            y = lab[b2]
        elif q == b2:
            y = lab[a2]
        if x != y:
            return x < y
    return False


@njit(cache=True)
def _best_swap_crossings(pair_paths, pair_lengths, data_index, starts, cc, ct, active, lab):
    """Best neighbor under the crossing metric: returns (cost, a, b)."""
    count = np.zeros(data_index.shape[0], dtype=np.int64)
    best_cost = -1
    best_a = -1
    best_b = -1
    na = active.shape[0]
    for x in range(na):
        for y in range(x + 1, na):
            a = active[x]
            b = active[y]
            lab[a], lab[b] = lab[b], lab[a]
            c = _crossings(pair_paths, pair_lengths, data_index, starts, cc, ct, lab, count)
            lab[a], lab[b] = lab[b], lab[a]
            if best_cost < 0 or c < best_cost or (c == best_cost and _lex_less(lab, a, b, best_a, best_b)):
                best_cost = c
                best_a = a
                best_b = b
    return best_cost, best_a, best_b


@njit(cache=True)
def _best_swap_depth(indptr, indices, is_anc, factories, reset, cold, kind, control, target, init_layer,
                     data_index, pair_paths, pair_lengths, factory_reach, active, lab, bound):
    """Best neighbor under the compiled-depth metric: returns (cost, a, b).

    Each neighbor is routed only up to the best cost seen so far (initially ``bound``),
    so the returned cost is exact whenever it is at most ``bound``.
    """
    ng = kind.shape[0]
    out_layer = np.empty(ng, dtype=np.int64)
    out_factory = np.empty(ng, dtype=np.int64)
    best_cost = -1
    best_a = -1
    best_b = -1
    na = active.shape[0]
    for x in range(na):
        for y in range(x + 1, na):
            a = active[x]
            b = active[y]
            lab[a], lab[b] = lab[b], lab[a]
            limit = bound if best_cost < 0 else min(bound, best_cost)
            c = _route(indptr, indices, is_anc, factories, reset, cold, kind, control, target, init_layer, lab,
                       data_index, pair_paths, pair_lengths, factory_reach, out_layer, out_factory, limit)
            lab[a], lab[b] = lab[b], lab[a]
            if c < 0:
                return c, a, b
            if best_cost < 0 or c < best_cost or (c == best_cost and _lex_less(lab, a, b, best_a, best_b)):
                best_cost = c
                best_a = a
                best_b = b
    return best_cost, best_a, best_b


def _raise_on(code: int) -> None:
    if code == NO_FACTORIES:
        msg = "The circuit contains T gates but there are no factories."
        raise NoFactories(msg)
    if code == UNROUTABLE:
        msg = "A gate has no valid path on the empty graph."
        raise UnroutableDemand(msg)


def route_depth(
    g: RoutingGraph, circ: CircuitArrays, lab: np.ndarray, reset_period: int, cold_start: bool = True
) -> tuple[int, np.ndarray, np.ndarray]:
    """Depth, final layer per gate and consumed factory per gate (``-1`` for none)."""
    ga = graph_arrays(g)
    ng = circ.kind.shape[0]
    out_layer = np.empty(ng, dtype=np.int64)
    out_factory = np.empty(ng, dtype=np.int64)
    depth = _route(ga.indptr, ga.indices, ga.is_anc, ga.factories, reset_period, cold_start, circ.kind,
                   circ.control, circ.target, circ.layer, lab, ga.data_index, ga.pair_paths, ga.pair_lengths,
                   ga.factory_reach, out_layer, out_factory, NO_BOUND)
    _raise_on(depth)
    return int(depth), out_layer, out_factory


def crossings(g: RoutingGraph, circ: CircuitArrays, lab: np.ndarray) -> int:
    ga = graph_arrays(g)
    count = np.zeros(g.num_vertices, dtype=np.int64)
    return int(_crossings(ga.pair_paths, ga.pair_lengths, ga.data_index, circ.cnot_layer_start,
                          circ.cnot_control, circ.cnot_target, lab, count))


def best_swap(
    g: RoutingGraph, circ: CircuitArrays, lab: np.ndarray, metric: str, reset_period: int, cold_start: bool = True,
    bound: int | None = None,
) -> tuple[int, int, int]:
    """Best neighbor ``(cost, a, b)``; ``a = -1`` when there is no neighbor.

    With ``bound`` the depth metric may report any cost above ``bound`` as ``bound + 1``
    (the neighbor is then still the best one among those costing at most ``bound``).
    """
    if circ.active.shape[0] < 2:
        return -1, -1, -1
    ga = graph_arrays(g)
    if metric == "crossings":
        c, a, b = _best_swap_crossings(ga.pair_paths, ga.pair_lengths, ga.data_index, circ.cnot_layer_start,
                                       circ.cnot_control, circ.cnot_target, circ.active, lab)
    else:
        c, a, b = _best_swap_depth(ga.indptr, ga.indices, ga.is_anc, ga.factories, reset_period, cold_start,
                                   circ.kind, circ.control, circ.target, circ.layer, ga.data_index,
                                   ga.pair_paths, ga.pair_lengths, ga.factory_reach, circ.active, lab,
                                   NO_BOUND if bound is None else bound)
    _raise_on(c)
    return int(c), int(a), int(b)
