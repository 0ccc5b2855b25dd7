"""Microscopic geometry: hexagonal tiling, color-code and surface-code patches, regions.

Hexagonal tiling
    Sites use axial coordinates ``(x, y)`` of a triangular lattice. Sites with
    ``(x - y) % 3 == 0`` are face centers, all other sites are qubits (the vertices of
    the honeycomb). A face consists of the six qubits around its center.

Triangles
    The triangle ``(kind, i, j)`` of :mod:`lscompile.layouts` is placed on a supercell of
    period ``P = 3t + 3``. Neighboring triangles are separated by a one-site corridor that
    hosts the extra ancilla qubits used for lattice surgery.
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Literal

from .layouts import DOWN, UP, LayoutKind, Triangle, pair_partner, pattern_is_data, triangle_neighbors
from .pauli import PauliOperator

Site = tuple[int, int]
HEX_STEPS: tuple[Site, ...] = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))
OFFSET = (1, 0)


class SubstrateError(ValueError):
    """Raised for invalid substrate parameters."""


def is_center(p: Site) -> bool:
    return (p[0] - p[1]) % 3 == 0


def site_neighbors(p: Site) -> list[Site]:
    return [(p[0] + dx, p[1] + dy) for dx, dy in HEX_STEPS]


def face_color(center: Site) -> int:
    """Three-coloring of the hexagonal faces (adjacent faces differ)."""
    return center[0] % 3


def period(t: int) -> int:
    return 3 * t + 3


def triangle_sites(tri: Triangle, t: int) -> set[Site]:
    """All lattice sites (qubits and face centers) of a triangle of side ``3t``."""
    kind, i, j = tri
    s, p = 3 * t, period(t)
    ox, oy = OFFSET
    if kind == UP:
        x0, y0 = i * p + 1 + ox, j * p + 1 + oy
        return {(x0 + a, y0 + b) for a in range(s + 1) for b in range(s + 1 - a)}
    x1, y1 = i * p + p - 1 + ox, j * p + p - 1 + oy
    return {(x1 - a, y1 - b) for a in range(s + 1) for b in range(s + 1 - a)}


def triangle_sides(tri: Triangle, t: int) -> dict[str, list[Site]]:
    """Qubits on the three sides of a triangle keyed by the side direction a/b/c."""
    sites = triangle_sites(tri, t)
    kind = tri[0]
    xs = [p[0] for p in sites]
    ys = [p[1] for p in sites]
    sums = [p[0] + p[1] for p in sites]
    if kind == UP:
        lines = {"a": lambda p: p[0] + p[1] == max(sums), "b": lambda p: p[1] == min(ys),
                 "c": lambda p: p[0] == min(xs)}
    else:
        lines = {"a": lambda p: p[0] + p[1] == min(sums), "b": lambda p: p[1] == max(ys),
                 "c": lambda p: p[0] == max(xs)}
    return {k: sorted(p for p in sites if f(p) and not is_center(p)) for k, f in lines.items()}


def triangle_faces(sites: set[Site]) -> list[tuple[Site, tuple[Site, ...]]]:
    """Faces of a region as ``(center, qubits)``, qubits truncated to the region."""
    out = []
    for c in sorted(p for p in sites if is_center(p)):
        qs = tuple(sorted(q for q in site_neighbors(c) if q in sites))
        out.append((c, qs))
    return out


def corridor(a: Triangle, b: Triangle, t: int) -> list[Site]:
    """Extra ancilla qubits on the corridor between two adjacent triangles.

    These are the non-center sites between the two triangles with exactly two neighbors
    inside each triangle, i.e. the midline of the gap minus its two end points.
    """
    ra, rb = triangle_sites(a, t), triangle_sites(b, t)
    cand = {q for p in ra for q in site_neighbors(p)} - ra - rb
    out = []
    for q in cand:
        if is_center(q):
            continue
        nb = site_neighbors(q)
        if sum(n in ra for n in nb) == 2 and sum(n in rb for n in nb) == 2:
            out.append(q)
    return sorted(out)


@dataclass(frozen=True)
class ColorCodePatch:
    """Triangular color-code patch of distance ``d = 2t + 1``.

    Attributes:
        t: Size parameter.
        qubits: Qubit sites in sorted order; the index in this list is the qubit id.
        faces: Qubit-id tuples of the faces; each face carries one X and one Z check.
        face_colors: Color of each face.
        boundaries: Qubit ids on each of the three sides, keyed by side direction.
        boundary_colors: The face color absent along each side.
    """

    t: int
    qubits: tuple[Site, ...]
    faces: tuple[tuple[int, ...], ...]
    face_colors: tuple[int, ...]
    boundaries: dict[str, tuple[int, ...]]
    boundary_colors: dict[str, int]

    @property
    def d(self) -> int:
        return 2 * self.t + 1

    @property
    def n(self) -> int:
        return len(self.qubits)

    def stabilizers(self) -> list[PauliOperator]:
        out = []
        for f in self.faces:
            out.append(PauliOperator.x(f))
            out.append(PauliOperator.z(f))
        return out

    def logical(self, basis: Literal["X", "Z"], side: str = "b") -> PauliOperator:
        """Logical operator of weight ``d`` supported on one side."""
        qs = self.boundaries[side]
        return PauliOperator.x(qs) if basis == "X" else PauliOperator.z(qs)


def color_patch_on(tri: Triangle, t: int) -> ColorCodePatch:
    sites = triangle_sites(tri, t)
    qubits = tuple(sorted(p for p in sites if not is_center(p)))
    index = {q: k for k, q in enumerate(qubits)}
    faces, colors = [], []
    for c, qs in triangle_faces(sites):
        faces.append(tuple(index[q] for q in qs))
        colors.append(face_color(c))
    sides = triangle_sides(tri, t)
    boundaries = {k: tuple(index[q] for q in v) for k, v in sides.items()}
    boundary_colors = {}
    for k, side in boundaries.items():
        touching = {colors[f] for f, qs in enumerate(faces) if set(qs) & set(side)}
        missing = {0, 1, 2} - touching
        boundary_colors[k] = missing.pop() if len(missing) == 1 else -1
    return ColorCodePatch(t, qubits, tuple(faces), tuple(colors), boundaries, boundary_colors)


def build_color_patch(t: int) -> ColorCodePatch:
    """Triangular color code with ``3t^2 + 3t + 1`` qubits and distance ``2t + 1``.

    Raises:
        SubstrateError: If ``t < 1``.
    """
    if t < 1:
        msg = f"t must be at least 1, got {t}."
        raise SubstrateError(msg)
    return color_patch_on((UP, 0, 0), t)


@dataclass(frozen=True)
class SurfaceCodePatch:
    """Surface-code patch drawn on a checkerboard of square plaquettes.

    Qubits sit on integer sites; a plaquette with lower-left corner ``(a, b)`` is X-type
    when ``a + b`` has the parity of ``d`` and Z-type otherwise.

    Attributes:
        d: Distance.
        variant: ``standard`` (a diamond ``|x| + |y| <= d - 1``), ``rotated`` (a ``d x d``
            square) or ``folded`` (the standard diamond with a fold along ``y = 0``).
        qubits: Qubit sites; list index is the qubit id.
        x_faces, z_faces: Qubit-id tuples of the checks.
        fold_diagonal: Qubit ids on the fold line (folded only).
        fold_pairs: Qubit pairs stacked by the fold (folded only).
        face_pairs: Pairs ``(x_face index, z_face index)`` stacked by the fold.
    """

    d: int
    variant: Literal["standard", "rotated", "folded"]
    qubits: tuple[Site, ...]
    x_faces: tuple[tuple[int, ...], ...]
    z_faces: tuple[tuple[int, ...], ...]
    fold_diagonal: tuple[int, ...] = ()
    fold_pairs: tuple[tuple[int, int], ...] = ()
    face_pairs: tuple[tuple[int, int], ...] = ()

    @property
    def n(self) -> int:
        return len(self.qubits)

    def stabilizers(self) -> list[PauliOperator]:
        return [PauliOperator.x(f) for f in self.x_faces] + [PauliOperator.z(f) for f in self.z_faces]

    def side(self, quadrant: int) -> tuple[int, ...]:
        """Qubit ids on one side of a diamond (quadrants 1..4 counter-clockwise)."""
        sx, sy = {1: (1, 1), 2: (-1, 1), 3: (-1, -1), 4: (1, -1)}[quadrant]
        r = self.d - 1
        return tuple(
            k for k, (x, y) in enumerate(self.qubits) if sx * x >= 0 and sy * y >= 0 and abs(x) + abs(y) == r
        )


def plaquette_is_x(a: int, b: int, d: int) -> bool:
    return (a + b) % 2 == d % 2


def checkerboard_code(sites: Iterable[Site], d: int, min_weight: int = 2) -> tuple[list, list]:
    """X and Z plaquettes of a region of the square lattice, truncated to the region."""
    sites = set(sites)
    lows = {(x - dx, y - dy) for x, y in sites for dx in (0, 1) for dy in (0, 1)}
    xs, zs = [], []
    for a, b in sorted(lows):
        qs = tuple(sorted(q for q in ((a, b), (a + 1, b), (a, b + 1), (a + 1, b + 1)) if q in sites))
        if len(qs) < min_weight:
            continue
        (xs if plaquette_is_x(a, b, d) else zs).append(((a, b), qs))
    return xs, zs


def _surface_standard(d: int) -> tuple[list[Site], list, list]:
    r = d - 1
    sites = sorted((x, y) for x in range(-r, r + 1) for y in range(-r, r + 1) if abs(x) + abs(y) <= r)
    xs, zs = checkerboard_code(sites, d, min_weight=3)
    return sites, xs, zs


def _surface_rotated(d: int) -> tuple[list[Site], list, list]:
    sites = sorted((x, y) for x in range(d) for y in range(d))
    xs, zs = checkerboard_code(sites, d, min_weight=2)

    def keep(entry: tuple, is_x: bool) -> bool:
        (a, b), qs = entry
        if len(qs) == 4:
            return True
        vertical = a in (-1, d - 1)
        return vertical if is_x else not vertical

    return sites, [e for e in xs if keep(e, True)], [e for e in zs if keep(e, False)]


def build_surface_patch(d: int, variant: Literal["standard", "rotated", "folded"] = "standard") -> SurfaceCodePatch:
    """Build a surface-code patch (see :class:`SurfaceCodePatch`)."""
    if d < 3 or d % 2 == 0:
        msg = f"Surface patch distance must be odd and at least 3, got {d}."
        raise SubstrateError(msg)
    if variant == "rotated":
        sites, xs, zs = _surface_rotated(d)
    elif variant in ("standard", "folded"):
        sites, xs, zs = _surface_standard(d)
    else:
        msg = f"Unknown surface patch variant {variant!r}."
        raise SubstrateError(msg)
    index = {q: k for k, q in enumerate(sites)}
    x_faces = tuple(tuple(index[q] for q in qs) for _, qs in xs)
    z_faces = tuple(tuple(index[q] for q in qs) for _, qs in zs)
    if variant != "folded":
        return SurfaceCodePatch(d, variant, tuple(sites), x_faces, z_faces)
    diagonal = tuple(index[q] for q in sites if q[1] == 0)
    pairs = tuple(sorted((index[(x, y)], index[(x, -y)]) for x, y in sites if y > 0))
    z_lookup = {frozenset(sites[k] for k in f): n for n, f in enumerate(z_faces)}
    face_pairs = []
    for m, f in enumerate(x_faces):
        image = frozenset((x, -y) for x, y in (sites[k] for k in f))
        if image not in z_lookup:
            msg = "Fold does not map X faces onto Z faces."
            raise SubstrateError(msg)
        face_pairs.append((m, z_lookup[image]))
    return SurfaceCodePatch(d, "folded", tuple(sites), x_faces, z_faces, diagonal, pairs, tuple(face_pairs))


def build_folded_surface_patch(d: int) -> SurfaceCodePatch:
    """Surface code folded along its diagonal so that every side exposes X_L and Z_L.

    Raises:
        SubstrateError: If ``d`` is even or smaller than 3.
    """
    return build_surface_patch(d, "folded")


@dataclass(frozen=True)
class RegionAssignment:
    """Qubit regions of a substrate.

    Attributes:
        data: Data patch regions keyed by triangle.
        ancilla: Ancilla patch regions keyed by triangle.
        factories: Factory placeholder regions keyed by triangle.
        extra_ancilla: Corridor qubits between adjacent triangles, keyed by the pair.
    """

    data: dict[Triangle, frozenset[int]]
    ancilla: dict[Triangle, frozenset[int]]
    factories: dict[Triangle, frozenset[int]]
    extra_ancilla: dict[tuple[Triangle, Triangle], frozenset[int]] = field(default_factory=dict)

    def all_regions(self) -> list[frozenset[int]]:
        return [*self.data.values(), *self.ancilla.values(), *self.factories.values(), *self.extra_ancilla.values()]


@dataclass(frozen=True)
class Tiling:
    """Qubit sites and check faces of a substrate.

    Attributes:
        kind: ``hexagonal`` for the color code, ``square`` for the surface code.
        vertices: Coordinates of each qubit id.
        faces: Qubit ids of each face.
        face_colors: Face colors (0..2) for hexagonal tilings, ``"X"``/``"Z"`` for square.
    """

    kind: Literal["hexagonal", "square"]
    vertices: tuple[tuple[int, ...], ...]
    faces: tuple[tuple[int, ...], ...]
    face_colors: tuple[int | str, ...]


def substrate_cells(extent: tuple[int, int]) -> list[Triangle]:
    w, h = extent
    return [(k, i, j) for j in range(h) for i in range(w) for k in (UP, DOWN)]


def triangle_degree(tri: Triangle, extent: tuple[int, int]) -> int:
    cells = set(substrate_cells(extent))
    return sum(n in cells for n, _ in triangle_neighbors(tri))


def interior_cells(extent: tuple[int, int]) -> list[Triangle]:
    """Triangles with all three neighbors inside the extent (the routing bulk)."""
    return [t for t in substrate_cells(extent) if triangle_degree(t, extent) == 3]


def data_triangles(layout: LayoutKind, extent: tuple[int, int]) -> list[Triangle]:
    """Data triangles of a layout on a finite extent.

    Only interior triangles can be data; the boundary ring is reserved for magic-state
    patches. For the pair layout both members of a pair must be interior. Data
    triangles without a neighbor in the largest connected ancilla region of the
    interior are turned into ancillas until every data patch can reach every other.
    """
    cells = interior_cells(extent)
    cellset = set(cells)
    data = set()
    for tri in cells:
        if not pattern_is_data(layout, tri):
            continue
        if layout == "pair" and pair_partner(tri) not in cellset:
            continue
        data.add(tri)
    while data:
        main = largest_component([t for t in cells if t not in data], cellset)
        cut = {t for t in data if not any(n in main for n, _ in triangle_neighbors(t))}
        if layout == "pair":
            cut |= {pair_partner(t) for t in cut}
        if not cut:
            break
        data -= cut
    return [t for t in cells if t in data]


def largest_component(free: list[Triangle], cellset: set[Triangle]) -> set[Triangle]:
    """Largest connected set of ``free`` triangles (first found on ties)."""
    freeset = set(free)
    seen: set[Triangle] = set()
    best: set[Triangle] = set()
    for start in free:
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for n, _ in triangle_neighbors(u):
                if n in freeset and n in cellset and n not in comp:
                    comp.add(n)
                    stack.append(n)
        seen |= comp
        if len(comp) > len(best):
            best = comp
    return best


def build_substrate(
    kind: Literal["color", "surface"],
    layout: LayoutKind,
    extent: tuple[int, int],
    d: int,
    factories: Iterable[Triangle] = (),
) -> tuple[Tiling, RegionAssignment]:
    """Lay out patches on a substrate.

    Args:
        kind: ``color`` (hexagonal tiling) or ``surface`` (folded surface codes).
        layout: Data-patch layout; the surface substrate needs ``pair``.
        extent: Number of cells ``(width, height)``; each cell holds two triangles.
        d: Code distance.
        factories: Triangles reserved for magic-state factories.

    Returns:
        The tiling and the region assignment.
    """
    if kind not in ("color", "surface"):
        msg = f"Unknown substrate kind {kind!r}."
        raise SubstrateError(msg)
    if kind == "surface" and layout != "pair":
        msg = f"The surface substrate only supports the pair layout, not {layout!r}."
        raise SubstrateError(msg)
    if extent[0] < 1 or extent[1] < 1:
        msg = f"Extent {extent} is too small."
        raise SubstrateError(msg)
    if d < 3 or d % 2 == 0:
        msg = f"Distance must be odd and at least 3, got {d}."
        raise SubstrateError(msg)
    cells = substrate_cells(extent)
    data = set(data_triangles(layout, extent))
    fac = set(factories)
    if fac & data or not fac <= set(cells):
        msg = "Factory triangles must be non-data triangles of the substrate."
        raise SubstrateError(msg)
    if kind == "color":
        return _color_substrate(cells, data, fac, extent, (d - 1) // 2)
    return _surface_substrate(cells, data, fac, d)


def _color_substrate(cells, data, fac, extent, t):
    index: dict[Site, int] = {}
    coords: list[Site] = []

    def ids(sites: Iterable[Site]) -> frozenset[int]:
        out = []
        for q in sorted(sites):
            if q not in index:
                index[q] = len(coords)
                coords.append(q)
            out.append(index[q])
        return frozenset(out)

    regions: dict[Triangle, frozenset[int]] = {}
    for tri in cells:
        regions[tri] = ids(p for p in triangle_sites(tri, t) if not is_center(p))
    cellset = set(cells)
    extra = {}
    for tri in cells:
        for nb, _ in triangle_neighbors(tri):
            if nb in cellset and tri < nb:
                extra[(tri, nb)] = ids(corridor(tri, nb, t))
    all_sites = set(coords)
    centers = sorted({c for q in all_sites for c in site_neighbors(q) if is_center(c)})
    faces, colors = [], []
    for c in centers:
        qs = tuple(index[q] for q in site_neighbors(c) if q in index)
        if len(qs) >= 2:
            faces.append(qs)
            colors.append(face_color(c))
    tiling = Tiling("hexagonal", tuple(coords), tuple(faces), tuple(colors))
    assignment = RegionAssignment(
        data={tri: regions[tri] for tri in cells if tri in data},
        ancilla={tri: regions[tri] for tri in cells if tri not in data and tri not in fac},
        factories={tri: regions[tri] for tri in cells if tri in fac},
        extra_ancilla=extra,
    )
    return tiling, assignment


def _surface_substrate(cells, data, fac, d):
    patch = build_folded_surface_patch(d)
    span = 2 * d
    coords: list[tuple[int, int]] = []
    faces, colors = [], []
    regions = {}
    for tri in cells:
        kind, i, j = tri
        base = len(coords)
        ox, oy = 2 * i * span + kind * span, j * span
        coords.extend((x + ox, y + oy) for x, y in patch.qubits)
        regions[tri] = frozenset(range(base, base + patch.n))
        faces.extend(tuple(base + q for q in f) for f in patch.x_faces)
        colors.extend("X" for _ in patch.x_faces)
        faces.extend(tuple(base + q for q in f) for f in patch.z_faces)
        colors.extend("Z" for _ in patch.z_faces)
    tiling = Tiling("square", tuple(coords), tuple(faces), tuple(colors))
    assignment = RegionAssignment(
        data={tri: regions[tri] for tri in cells if tri in data},
        ancilla={tri: regions[tri] for tri in cells if tri not in data and tri not in fac},
        factories={tri: regions[tri] for tri in cells if tri in fac},
    )
    return tiling, assignment


def tri_id(tri: Triangle) -> str:
    kind, i, j = tri
    return f"{'UD'[kind]}{i}_{j}"


def substrate_to_json(tiling: Tiling, regions: RegionAssignment) -> str:
    """Dump a substrate: vertex coordinates, faces, face types and region membership."""
    membership: dict[int, str] = {}
    for label, group in (("data", regions.data), ("ancilla", regions.ancilla), ("factory", regions.factories)):
        for tri, qs in group.items():
            for q in qs:
                membership[q] = f"{label}:{tri_id(tri)}"
    for (a, b), qs in regions.extra_ancilla.items():
        for q in qs:
            membership[q] = f"corridor:{tri_id(a)}-{tri_id(b)}"
    doc = {
        "kind": tiling.kind,
        "vertices": [list(v) for v in tiling.vertices],
        "faces": [list(f) for f in tiling.faces],
        "face_types": list(tiling.face_colors),
        "regions": [membership.get(q, "") for q in range(len(tiling.vertices))],
    }
    return json.dumps(doc, sort_keys=True)
