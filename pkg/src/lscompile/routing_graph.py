"""Routing graph: patches as vertices, shared sides as edges."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np

from .layouts import DOWN, LAYOUTS, UP, LayoutKind, Triangle, pattern_is_data, triangle_neighbors
from .substrate import data_triangles, interior_cells, largest_component, substrate_cells, tri_id

SubstrateKind = Literal["color", "surface"]
VertexType = Literal["L", "A", "F"]
DIRECTIONS = ("a", "b", "c")
DIR_BIT = {"a": 1, "b": 2, "c": 4}
ALL_DIRS = 7


class RoutingGraphError(ValueError):
    """Raised for incompatible or too small routing-graph configurations."""


class PathError(ValueError):
    """Raised when a vertex sequence is not a path of the graph."""


@dataclass(frozen=True)
class FactoryConfig:
    """Magic-state factories.

    Attributes:
        count: Number of factories.
        reset_period: Layers needed to produce one magic state.
        positions: Explicit factory triangles; evenly spaced boundary slots when empty.
    """

    count: int = 0
    reset_period: int = 1
    positions: tuple[Triangle, ...] = ()

    def __post_init__(self) -> None:
        if self.count < 0:
            msg = "Factory count must be non-negative."
            raise RoutingGraphError(msg)
        if self.reset_period < 1:
            msg = "Reset period must be a positive integer."
            raise RoutingGraphError(msg)
        if self.positions and len(self.positions) != self.count:
            msg = "Number of factory positions differs from the factory count."
            raise RoutingGraphError(msg)


@dataclass
class RoutingGraph:
    """Hexagonal routing graph.

    Vertices are the interior triangles of the extent plus the boundary triangles that
    host magic-state patches; the remaining boundary ring is reserved for factories and
    not used for routing. Vertex ids are positions in ``triangles``; neighbor lists are
    sorted by id.

    Attributes:
        substrate: ``color`` or ``surface``.
        layout: Layout the data vertices follow.
        extent: Cell extent of the underlying triangle grid.
        triangles: Triangle of each vertex.
        types: ``L`` (data), ``A`` (ancilla) or ``F`` (factory) per vertex.
        adjacency: Sorted neighbor ids per vertex.
        direction: Direction bit (a=1, b=2, c=4) per ordered edge.
    """

    substrate: SubstrateKind
    layout: LayoutKind
    extent: tuple[int, int]
    triangles: list[Triangle]
    types: list[VertexType]
    adjacency: list[list[int]]
    direction: dict[tuple[int, int], int]
    reset_period: int = 1
    index: dict[Triangle, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.index = {t: k for k, t in enumerate(self.triangles)}
        self.data_vertices = [v for v, t in enumerate(self.types) if t == "L"]
        self.ancilla_vertices = [v for v, t in enumerate(self.types) if t == "A"]
        self.factory_vertices = [v for v, t in enumerate(self.types) if t == "F"]
        self.is_ancilla = np.array([t == "A" for t in self.types], dtype=bool)

    @property
    def num_vertices(self) -> int:
        return len(self.triangles)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.num_vertices) for v in self.adjacency[u] if u < v]

    def edge_direction(self, u: int, v: int) -> str:
        return DIRECTIONS[self.direction[(u, v)].bit_length() - 1]

    def coordinates(self, v: int) -> tuple[float, float]:
        """Planar position of the triangle centroid."""
        kind, i, j = self.triangles[v]
        a, b = (i + 1 / 3, j + 1 / 3) if kind == UP else (i + 2 / 3, j + 2 / 3)
        return (a + b / 2, b * math.sqrt(3) / 2)

    def to_json(self, labeling: list[int] | None = None) -> str:
        """Typed vertex list and direction-tagged edge list."""
        labels = {v: q for q, v in enumerate(labeling)} if labeling is not None else {}
        vertices = []
        for v in range(self.num_vertices):
            x, y = self.coordinates(v)
            vertices.append({
                "id": v,
                "name": tri_id(self.triangles[v]),
                "type": self.types[v],
                "x": round(x, 6),
                "y": round(y, 6),
                "label": labels.get(v),
            })
        edges = [{"u": u, "v": v, "direction": self.edge_direction(u, v)} for u, v in self.edges()]
        doc = {"substrate": self.substrate, "layout": self.layout, "extent": list(self.extent),
               "vertices": vertices, "edges": edges}
        return json.dumps(doc, sort_keys=True)


def check_compatible(layout: LayoutKind, substrate: SubstrateKind) -> None:
    if layout not in LAYOUTS:
        msg = f"Unknown layout {layout!r}."
        raise RoutingGraphError(msg)
    if substrate not in ("color", "surface"):
        msg = f"Unknown substrate {substrate!r}."
        raise RoutingGraphError(msg)
    if substrate == "surface" and layout != "pair":
        msg = f"The surface substrate only supports the pair layout, not {layout!r}."
        raise RoutingGraphError(msg)


def _boundary_cycle(cells: list[Triangle], extent: tuple[int, int]) -> list[Triangle]:
    """Degree-2 boundary triangles ordered counter-clockwise around the extent."""
    cellset = set(cells)
    w, h = extent
    cx, cy = (w + h / 2) / 2, h * math.sqrt(3) / 4
    out = []
    for tri in cells:
        if sum(n in cellset for n, _ in triangle_neighbors(tri)) != 2:
            continue
        kind, i, j = tri
        a, b = (i + 1 / 3, j + 1 / 3) if kind == UP else (i + 2 / 3, j + 2 / 3)
        x, y = a + b / 2, b * math.sqrt(3) / 2
        out.append((math.atan2(y - cy, x - cx) % (2 * math.pi), tri))
    return [tri for _, tri in sorted(out)]


def _main_ancillas(extent: tuple[int, int], data: set[Triangle]) -> set[Triangle]:
    """Largest connected region of interior ancilla triangles."""
    cells = interior_cells(extent)
    return largest_component([t for t in cells if t not in data], set(cells))


def factory_slots(layout: LayoutKind, extent: tuple[int, int], count: int) -> list[Triangle]:
    """Evenly spaced magic-state slots on the boundary cycle.

    A slot is a boundary triangle with two neighbors in the interior, at least one of
    them in the connected ancilla region; slots next to a data patch are skipped when
    enough other slots exist.
    """
    if count == 0:
        return []
    cells = substrate_cells(extent)
    interior = set(interior_cells(extent))
    data = set(data_triangles(layout, extent))
    main = _main_ancillas(extent, data)
    cycle = []
    for t in _boundary_cycle(cells, extent):
        nbs = [n for n, _ in triangle_neighbors(t) if n in interior]
        if len(nbs) == 2 and any(n in main for n in nbs):
            cycle.append(t)
    free = [t for t in cycle if not any(n in data for n, _ in triangle_neighbors(t))]
    pool = free if len(free) >= count else cycle
    if len(pool) < count:
        msg = f"Extent {extent} has only {len(pool)} boundary slots for {count} factories."
        raise RoutingGraphError(msg)
    return [pool[(k * len(pool)) // count] for k in range(count)]


def build_routing_graph(
    layout: LayoutKind,
    extent: tuple[int, int],
    substrate: SubstrateKind = "color",
    factories: FactoryConfig | None = None,
    min_data: int = 0,
) -> RoutingGraph:
    """Build the routing graph of a layout.

    Args:
        layout: Data layout.
        extent: Cell extent ``(width, height)``.
        substrate: ``color`` or ``surface``.
        factories: Factory configuration.
        min_data: Required number of data vertices.

    Raises:
        RoutingGraphError: On incompatible or too small configurations.
    """
    check_compatible(layout, substrate)
    factories = factories or FactoryConfig()
    if extent[0] < 2 or extent[1] < 2:
        msg = f"Extent {extent} is too small."
        raise RoutingGraphError(msg)
    data = set(data_triangles(layout, extent))
    if len(data) < min_data:
        msg = f"Extent {extent} hosts {len(data)} data patches, {min_data} required."
        raise RoutingGraphError(msg)
    fac = list(factories.positions) or factory_slots(layout, extent, factories.count)
    facset = set(fac)
    if len(facset) != len(fac) or facset & data or not facset <= set(substrate_cells(extent)):
        msg = "Factories must occupy distinct non-data triangles of the extent."
        raise RoutingGraphError(msg)
    main = _main_ancillas(extent, data)
    if not all(any(n in main for n, _ in triangle_neighbors(t)) for t in facset):
        msg = "Every factory needs a neighbor in the connected ancilla region."
        raise RoutingGraphError(msg)
    cells = sorted(set(interior_cells(extent)) | facset)
    triangles = sorted(cells, key=lambda t: (t[2], t[1], t[0]))
    index = {t: k for k, t in enumerate(triangles)}
    types: list[VertexType] = ["L" if t in data else "F" if t in facset else "A" for t in triangles]
    adjacency: list[list[int]] = [[] for _ in triangles]
    direction: dict[tuple[int, int], int] = {}
    for t in triangles:
        u = index[t]
        for n, dname in triangle_neighbors(t):
            if n in index:
                adjacency[u].append(index[n])
                direction[(u, index[n])] = DIR_BIT[dname]
    for nb in adjacency:
        nb.sort()
    return RoutingGraph(substrate, layout, extent, triangles, types, adjacency, direction, factories.reset_period)


def extent_for(layout: LayoutKind, num_qubits: int) -> tuple[int, int]:
    """Smallest square extent hosting ``num_qubits`` data patches."""
    s = 2
    while len(data_triangles(layout, (s, s))) < num_qubits:
        s += 1
    return (s, s)


def is_valid_path(g: RoutingGraph, path: list[int]) -> bool:
    """Whether a path can host a lattice-surgery snake with a logical ancilla.

    Paths need at least two edges and ancilla interiors; on the surface substrate they
    must use all three edge directions.

    Raises:
        PathError: If ``path`` is not a simple path of ``g``.
    """
    if len(path) < 2:
        msg = "A path needs at least two vertices."
        raise PathError(msg)
    if len(set(path)) != len(path):
        msg = "Path repeats a vertex."
        raise PathError(msg)
    mask = 0
    for u, v in zip(path, path[1:]):
        if (u, v) not in g.direction:
            msg = f"Vertices {u} and {v} are not adjacent."
            raise PathError(msg)
        mask |= g.direction[(u, v)]
    if len(path) < 3:
        return False
    if g.types[path[0]] == "A" or g.types[path[-1]] == "A":
        return False
    if not all(g.types[v] == "A" for v in path[1:-1]):
        return False
    return g.substrate == "color" or mask == ALL_DIRS


@dataclass(frozen=True)
class PackingRatio:
    value: Fraction
    asymptotic: bool

    def __float__(self) -> float:
        return float(self.value)


def packing_ratio(layout: LayoutKind, extent: tuple[int, int] | None = None, tol: float = 1e-3) -> PackingRatio:
    """Fraction of data patches among all patches of the periodic layout pattern.

    Without an extent the pattern is evaluated on growing square extents until two
    successive values agree to ``tol``; with an explicit extent the single value is
    returned and flagged as non-asymptotic.
    """
    def ratio(w: int, h: int) -> Fraction:
        cells = substrate_cells((w, h))
        return Fraction(sum(pattern_is_data(layout, t) for t in cells), len(cells))

    if extent is not None:
        return PackingRatio(ratio(*extent), False)
    prev = None
    s = 6
    while True:
        cur = ratio(s, s)
        if prev is not None and abs(float(cur - prev)) < tol:
            return PackingRatio(cur, True)
        prev = cur
        s += 6


@dataclass(frozen=True)
class Labeling:
    """Injective map from qubit labels to data vertices (``vertex[q]``)."""

    vertex: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertex)

    def swapped(self, a: int, b: int) -> Labeling:
        v = list(self.vertex)
        v[a], v[b] = v[b], v[a]
        return Labeling(tuple(v))


def random_labeling(g: RoutingGraph, q: int, seed: int | np.random.Generator) -> Labeling:
    """Uniformly random injective labeling, deterministic under the seed."""
    if q < 0 or q > len(g.data_vertices):
        msg = f"Cannot place {q} qubits on {len(g.data_vertices)} data vertices."
        raise RoutingGraphError(msg)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    perm = rng.permutation(len(g.data_vertices))[:q]
    return Labeling(tuple(g.data_vertices[int(k)] for k in perm))


__all__ = [
    "DOWN",
    "UP",
    "FactoryConfig",
    "Labeling",
    "PackingRatio",
    "PathError",
    "RoutingGraph",
    "RoutingGraphError",
    "build_routing_graph",
    "extent_for",
    "factory_slots",
    "is_valid_path",
    "packing_ratio",
    "random_labeling",
]
