"""Stabilizers of lattice-surgery merges and the joint subsystem code.

A merge joins two logical patches through a snake of ancilla patches. In the split
configuration the patches are disjoint codes and the extra ancilla qubits between them
are prepared in product states. In the merged configuration new checks across the seams
fuse everything into a single code whose stabilizer group contains the measured joint
logical operator. Both configurations are gauge fixes of one subsystem code.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

from .layouts import Triangle, triangle_neighbors
from .pauli import (
    PauliOperator,
    RowSpace,
    bits_of,
    intersect,
    kernel_combinations,
    nullspace,
    product,
    support_to_int,
    symplectic,
)
from .substrate import (
    Site,
    checkerboard_code,
    corridor,
    is_center,
    site_neighbors,
    triangle_faces,
    triangle_sides,
    triangle_sites,
)

Basis = Literal["ZZ", "XX"]


class SurgeryError(ValueError):
    """Raised for malformed merge specifications or inconsistent merge data."""


@dataclass(frozen=True)
class MergeSpec:
    """A lattice-surgery merge.

    Attributes:
        substrate: ``color`` or ``surface``.
        d: Code distance.
        left: Triangle of the first logical patch.
        right: Triangle of the second logical patch.
        snake: Ancilla triangles between them, in order.
        basis: Measured operator, ``ZZ`` or ``XX``.
        logical_ancilla_slot: Snake triangle hosting the logical ancilla of a CNOT.

    For the surface substrate the snake is modeled as a straight strip between a
    standard patch and a folded patch; only its length is used.
    """

    substrate: Literal["color", "surface"]
    d: int
    left: Triangle
    right: Triangle
    snake: tuple[Triangle, ...]
    basis: Basis = "ZZ"
    logical_ancilla_slot: Triangle | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "snake", tuple(tuple(s) for s in self.snake))
        if self.substrate not in ("color", "surface"):
            msg = f"Unknown substrate {self.substrate!r}."
            raise SurgeryError(msg)
        if self.d < 3 or self.d % 2 == 0:
            msg = f"Distance must be odd and at least 3, got {self.d}."
            raise SurgeryError(msg)
        if self.basis not in ("ZZ", "XX"):
            msg = f"Unknown merge basis {self.basis!r}."
            raise SurgeryError(msg)
        if not self.snake:
            msg = "A merge needs at least one snake patch."
            raise SurgeryError(msg)
        chain = self.chain
        if len(set(chain)) != len(chain):
            msg = "Merge chain visits a patch twice."
            raise SurgeryError(msg)
        if self.substrate == "color":
            for a, b in zip(chain, chain[1:]):
                if b not in {n for n, _ in triangle_neighbors(a)}:
                    msg = f"Patches {a} and {b} of the merge chain are not adjacent."
                    raise SurgeryError(msg)
        if self.logical_ancilla_slot is None:
            object.__setattr__(self, "logical_ancilla_slot", self.snake[0])
        elif tuple(self.logical_ancilla_slot) not in self.snake:
            msg = "The logical ancilla slot must lie on the snake."
            raise SurgeryError(msg)

    @property
    def chain(self) -> tuple[Triangle, ...]:
        return (tuple(self.left), *self.snake, tuple(self.right))


@dataclass
class MergeLayout:
    """Qubits and operators of one merge instance.

    Attributes:
        spec: The merge.
        qubits: Coordinates of each qubit id.
        split: Split stabilizer generators.
        merged: Merged stabilizer generators.
        split_tags, merged_tags: A short tag per generator (``face``, ``single``,
            ``seam``, ``extended``, ...).
        target: The joint logical operator measured by the merge.
        logical_qubits: Qubits of the two logical patches.
        snake_qubits: Qubits of the snake (ancilla patches and extra ancillas).
        m_indices: Indices into ``merged`` forming the measurement subset.
    """

    spec: MergeSpec
    qubits: tuple[tuple[int, int], ...]
    split: list[PauliOperator]
    merged: list[PauliOperator]
    split_tags: list[str]
    merged_tags: list[str]
    target: PauliOperator
    logical_qubits: frozenset[int]
    snake_qubits: frozenset[int]
    m_indices: list[int] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.qubits)


def _swap(layout: MergeLayout) -> MergeLayout:
    swap = {"ZZ": "XX", "XX": "ZZ"}
    spec = MergeSpec(
        layout.spec.substrate, layout.spec.d, layout.spec.left, layout.spec.right, layout.spec.snake,
        swap[layout.spec.basis], layout.spec.logical_ancilla_slot,
    )
    return MergeLayout(
        spec, layout.qubits, [p.swap_xz() for p in layout.split], [p.swap_xz() for p in layout.merged],
        list(layout.split_tags), list(layout.merged_tags), layout.target.swap_xz(),
        layout.logical_qubits, layout.snake_qubits, list(layout.m_indices),
    )


_CACHE: dict[MergeSpec, MergeLayout] = {}


def merge_layout(spec: MergeSpec) -> MergeLayout:
    """Build (and cache) all operators of a merge."""
    if spec in _CACHE:
        return _CACHE[spec]
    zz = MergeSpec(spec.substrate, spec.d, spec.left, spec.right, spec.snake, "ZZ", spec.logical_ancilla_slot)
    layout = _color_layout(zz) if spec.substrate == "color" else _surface_layout(zz)
    _check_internal(layout)
    if spec.basis == "XX":
        layout = _swap(layout)
    _CACHE[spec] = layout
    return layout


def _side_toward(tri: Triangle, other: Triangle, t: int) -> list[Site]:
    direction = next(dname for n, dname in triangle_neighbors(tri) if n == other)
    return triangle_sides(tri, t)[direction]


def _color_layout(spec: MergeSpec) -> MergeLayout:
    t = (spec.d - 1) // 2
    chain = spec.chain
    regions = [triangle_sites(tri, t) for tri in chain]
    corridors = [corridor(a, b, t) for a, b in zip(chain, chain[1:])]
    in_patch = set().union(*regions)
    corr_all = {q for c in corridors for q in c}
    coords = sorted({p for r in regions for p in r if not is_center(p)} | corr_all)
    index = {q: k for k, q in enumerate(coords)}
    universe = set(coords)

    def ids(sites) -> list[int]:
        return [index[q] for q in sites]

    split, split_tags = [], []
    merged, merged_tags = [], []
    for region in regions:
        for c, qs in triangle_faces(region):
            split += [PauliOperator.x(ids(qs)), PauliOperator.z(ids(qs))]
            split_tags += ["face", "face"]
            corr_nb = [q for q in site_neighbors(c) if q in corr_all]
            if corr_nb:
                merged.append(PauliOperator.x(ids(sorted(set(qs) | set(corr_nb)))))
                merged_tags.append("extended")
            else:
                merged.append(PauliOperator.x(ids(qs)))
                merged_tags.append("face")
            merged.append(PauliOperator.z(ids(qs)))
            merged_tags.append("face")
    for q in sorted(corr_all):
        split.append(PauliOperator.x([index[q]]))
        split_tags.append("single")

    seam_index: dict[Site, int] = {}
    centers = sorted({c for q in corr_all for c in site_neighbors(q) if is_center(c)})
    for c in centers:
        if c in in_patch:
            qs = [q for q in site_neighbors(c) if q in corr_all]
            tag = "seam-pair"
        else:
            qs = [q for q in site_neighbors(c) if q in universe]
            tag = "seam"
        seam_index[c] = len(merged)
        merged.append(PauliOperator.z(ids(sorted(qs))))
        merged_tags.append(tag)

    left_side = _side_toward(chain[0], chain[1], t)
    right_side = _side_toward(chain[-1], chain[-2], t)
    target = PauliOperator.z(ids(left_side) + ids(right_side))

    m: set[int] = set()
    for k, corr in enumerate(corridors):
        near = {c for q in corr for c in site_neighbors(q) if is_center(c)}
        for c in near:
            if c not in in_patch or c in regions[k]:
                m.add(seam_index[c])
    face_rows: dict[int, list[int]] = {}
    for k in range(1, len(chain) - 1):
        s_in = set(_side_toward(chain[k], chain[k - 1], t))
        s_out = set(_side_toward(chain[k], chain[k + 1], t))
        need = support_to_int(ids(s_in ^ s_out))
        rows, which = [], []
        for c, qs in triangle_faces(regions[k]):
            rows.append(support_to_int(ids(qs)))
            which.append(c)
        combo = RowSpace(rows).decompose(need)
        if combo is None:
            msg = f"No stabilizer subset of snake patch {chain[k]} joins its two seams."
            raise SurgeryError(msg)
        face_rows[k] = combo
        for f in combo:
            c = which[f]
            qs = ids(q for q in site_neighbors(c) if q in regions[k])
            op = PauliOperator.z(sorted(qs))
            m.add(next(i for i, g in enumerate(merged) if g == op and merged_tags[i] == "face"))
    logical = frozenset(ids(p for p in regions[0] | regions[-1] if not is_center(p)))
    layout = MergeLayout(
        spec, tuple(coords), split, merged, split_tags, merged_tags, target, logical,
        frozenset(range(len(coords))) - logical, sorted(m),
    )
    return layout


def _surface_layout(spec: MergeSpec) -> MergeLayout:
    d = spec.d
    r = d - 1
    dist = r * (len(spec.snake) + 1)
    left = {(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1) if abs(x) + abs(y) <= r}
    right = {(x + dist, y + dist) for x, y in left}
    band = {
        (x, y)
        for x in range(-r, dist + r + 1)
        for y in range(-r, dist + r + 1)
        if r < x + y < 2 * dist - r and abs(x - y) <= r
    }
    coords = sorted(left | right | band)
    index = {q: k for k, q in enumerate(coords)}
    universe = set(coords)

    def ids(sites) -> list[int]:
        return sorted(index[q] for q in sites)

    split, split_tags = [], []
    for region in (left, right):
        xs, zs = checkerboard_code(region, d, min_weight=3)
        split += [PauliOperator.x(ids(qs)) for _, qs in xs] + [PauliOperator.z(ids(qs)) for _, qs in zs]
        split_tags += ["face"] * (len(xs) + len(zs))
    split += [PauliOperator.x([index[q]]) for q in sorted(band)]
    split_tags += ["single"] * len(band)

    merged, merged_tags, m = [], [], []
    xs, zs = checkerboard_code(universe, d, min_weight=2)
    for is_x, entries in ((True, xs), (False, zs)):
        for _, qs in entries:
            touches = any(q in band for q in qs)
            inside = set(qs) <= left or set(qs) <= right
            if not touches and not (inside and len(qs) >= 3):
                continue
            if is_x:
                merged.append(PauliOperator.x(ids(qs)))
                merged_tags.append("extended" if touches else "face")
            else:
                if touches:
                    m.append(len(merged))
                merged.append(PauliOperator.z(ids(qs)))
                merged_tags.append("seam" if touches else "face")
    left_side = [(x, y) for x, y in left if x >= 0 and y >= 0 and x + y == r]
    right_side = [(x + dist, y + dist) for x, y in left if x <= 0 and y <= 0 and x + y == -r]
    target = PauliOperator.z(ids(left_side + right_side))
    logical = frozenset(ids(left | right))
    return MergeLayout(
        spec, tuple(coords), split, merged, split_tags, merged_tags, target, logical,
        frozenset(ids(band)), m,
    )


def _check_internal(layout: MergeLayout) -> None:
    """The listed merged generators must span the merged group implied by the split.

    The merged group is generated by the new seam checks together with every split
    stabilizer commuting with all of them.
    """
    n = layout.n
    split_bits = [p.to_bits(n) for p in layout.split]
    split_space = RowSpace(split_bits)
    new = [p.to_bits(n) for p in layout.merged if not split_space.contains(p.to_bits(n))]
    syndromes = [sum(symplectic(v, z, n) << i for i, z in enumerate(new)) for v in split_bits]
    kernel = []
    for combo in kernel_combinations(syndromes):
        v = 0
        for i in bits_of(combo):
            v ^= split_bits[i]
        kernel.append(v)
    implied = RowSpace(new + kernel)
    listed = RowSpace(p.to_bits(n) for p in layout.merged)
    if listed.rank != implied.rank or not all(implied.contains(v) for v in listed.basis()):
        msg = "Merged generators do not match the group implied by the split configuration."
        raise SurgeryError(msg)


def build_split_stabilizers(spec: MergeSpec) -> list[PauliOperator]:
    """Patch stabilizers of all chain patches plus single-qubit checks on extra ancillas."""
    return list(merge_layout(spec).split)


def build_merged_stabilizers(spec: MergeSpec) -> list[PauliOperator]:
    """Stabilizers of the merged code: extended patch checks and new seam checks."""
    return list(merge_layout(spec).merged)


@dataclass
class MeasurementSubset:
    """Merged generators whose outcome product is the joint logical measurement.

    Attributes:
        indices: Positions in the merged generator list.
        operators: The selected generators.
        target_logical: Their product, equal to Z_L x Z_L (or X_L x X_L).
    """

    indices: list[int]
    operators: list[PauliOperator]
    target_logical: PauliOperator


def select_measurement_subset(spec: MergeSpec, merged: Sequence[PauliOperator] | None = None) -> MeasurementSubset:
    """Choose the subset M of merged checks revealing the joint logical value.

    The subset contains the seam checks across every seam, and inside every snake
    patch the face checks that join its two seam-facing sides. The result is checked
    qubit by qubit: the product must equal the target logical exactly, which means the
    two seam-facing logical sides are covered once and every snake qubit an even number
    of times.

    Raises:
        SurgeryError: If the construction fails for the given geometry.
    """
    layout = merge_layout(spec)
    if merged is not None and list(merged) != layout.merged:
        msg = "Merged generators do not belong to this merge specification."
        raise SurgeryError(msg)
    ops = [layout.merged[i] for i in layout.m_indices]
    prod = product(ops)
    if prod != layout.target:
        msg = "Measurement subset does not multiply to the joint logical operator."
        raise SurgeryError(msg)
    return MeasurementSubset(list(layout.m_indices), ops, layout.target)


def coverage_counts(ops: Sequence[PauliOperator], n: int) -> list[int]:
    """Number of operators of ``ops`` acting on each qubit."""
    counts = [0] * n
    for op in ops:
        for q in op.support:
            counts[q] += 1
    return counts


@dataclass
class SubsystemCodeSpec:
    """Joint subsystem code of a split and a merged configuration.

    Attributes:
        n: Number of qubits.
        split: Split stabilizer generators.
        merged: Merged stabilizer generators.
        stabilizers: Basis of S, the row-space intersection of split and merged.
        intermediary: The set I of merged generators outside S that anticommute with a
            split generator; measuring them performs the merge.
        split_gauge: Split generators outside S (measured when splitting).
        partners: For each element of I, the index of a split generator anticommuting
            with it.
        strings: Extra gauge operators that remove joint logicals from the center.
        gauge_generators: All generators of the gauge group outside S.
        bare_logicals: Representatives of the bare logical operators modulo S.
    """

    n: int
    split: list[PauliOperator]
    merged: list[PauliOperator]
    stabilizers: list[PauliOperator]
    intermediary: list[PauliOperator]
    split_gauge: list[PauliOperator]
    partners: list[int]
    strings: list[PauliOperator]
    gauge_generators: list[PauliOperator]
    bare_logicals: list[PauliOperator]

    @cached_property
    def stabilizer_space(self) -> RowSpace:
        return RowSpace(p.to_bits(self.n) for p in self.stabilizers)

    @cached_property
    def gauge_space(self) -> RowSpace:
        return RowSpace([p.to_bits(self.n) for p in self.stabilizers] + [p.to_bits(self.n) for p in self.gauge_generators])

    @property
    def gauge_pairs(self) -> int:
        return (self.gauge_space.rank - self.stabilizer_space.rank) // 2

    @property
    def logical_qubits(self) -> int:
        return len(self.bare_logicals) // 2


def _assert_commuting(ops: Sequence[PauliOperator], n: int, name: str) -> None:
    bits = [p.to_bits(n) for p in ops]
    for i, a in enumerate(bits):
        for b in bits[i + 1:]:
            if symplectic(a, b, n):
                msg = f"{name} generators do not commute."
                raise SurgeryError(msg)


def _center(gens: Sequence[int], n: int) -> list[int]:
    """Basis of the elements of span(gens) commuting with every generator."""
    syndromes = [sum(symplectic(v, g, n) << i for i, g in enumerate(gens)) for v in gens]
    out = []
    for combo in kernel_combinations(syndromes):
        v = 0
        for i in bits_of(combo):
            v ^= gens[i]
        if v:
            out.append(v)
    return out


def _swapped(v: int, n: int) -> int:
    mask = (1 << n) - 1
    return (v >> n) | ((v & mask) << n)


def build_subsystem_code(
    split: Sequence[PauliOperator], merged: Sequence[PauliOperator], n: int | None = None
) -> SubsystemCodeSpec:
    """Assemble the subsystem code whose gauge fixes are ``split`` and ``merged``.

    The gauge group is generated by both stabilizer groups and by string operators that
    anticommute with joint logicals measured by the merge, so that its center is
    exactly the intersection S of the two groups.

    Raises:
        SurgeryError: If either input is not internally commuting.
    """
    split, merged = list(split), list(merged)
    if n is None:
        n = 1 + max((q for p in split + merged for q in p.support), default=-1)
    _assert_commuting(split, n, "Split")
    _assert_commuting(merged, n, "Merged")
    sb = [p.to_bits(n) for p in split]
    mb = [p.to_bits(n) for p in merged]
    s_bits = intersect(sb, mb, 2 * n)
    s_space = RowSpace(s_bits)
    intermediary, partners = [], []
    for p, v in zip(merged, mb):
        if s_space.contains(v):
            continue
        hits = [i for i, w in enumerate(sb) if symplectic(v, w, n)]
        if hits:
            intermediary.append(p)
            partners.append(hits[0])
    split_gauge = [p for p, v in zip(split, sb) if not s_space.contains(v)]
    merged_gauge = [p for p, v in zip(merged, mb) if not s_space.contains(v)]

    gauge_bits = sb + mb
    strings: list[PauliOperator] = []
    x_type = all(p.is_z_type for p in intermediary)
    while True:
        center = _center(gauge_bits, n)
        extra = [v for v in center if not s_space.contains(v)]
        extra_space = RowSpace(s_bits)
        independent = [v for v in extra if extra_space.add(v)]
        if not independent:
            break
        string = _string_operator(s_bits, independent[0], n, x_type)
        strings.append(PauliOperator.from_bits(string, n))
        gauge_bits.append(string)

    centralizer = nullspace([_swapped(g, n) for g in gauge_bits], 2 * n)
    quotient = RowSpace(s_bits)
    bare = [PauliOperator.from_bits(v, n) for v in centralizer if quotient.add(v)]
    return SubsystemCodeSpec(
        n, split, merged, [PauliOperator.from_bits(v, n) for v in s_bits], intermediary, split_gauge,
        partners, strings, split_gauge + merged_gauge + strings, bare,
    )


def _string_operator(s_bits: Sequence[int], joint: int, n: int, x_type: bool) -> int:
    """A Pauli commuting with S and anticommuting with ``joint``.

    A pure X (or pure Z) operator is preferred, with the lowest-indexed support found
    by elimination.
    """
    rows = [_swapped(v, n) for v in s_bits]
    mask = (1 << n) - 1
    if x_type:
        restrict = mask
    else:
        restrict = mask << n
    # solve <p, s> = 0 for all s, <p, joint> = 1 with p inside ``restrict``
    cols = [c for c in range(2 * n) if restrict >> c & 1]
    eq_rows = [r & restrict for r in rows]
    target = _swapped(joint, n) & restrict
    space = nullspace(eq_rows, 2 * n)
    for v in space:
        if not v & ~restrict and bin(v & target).count("1") % 2:
            return v
    for v in nullspace(rows, 2 * n):
        if bin(v & _swapped(joint, n)).count("1") % 2:
            return v
    del cols
    msg = "No string operator anticommutes with the joint logical."
    raise SurgeryError(msg)


def gauge_fix_detailed(
    code: SubsystemCodeSpec, direction: Literal["merge", "split"]
) -> tuple[list[PauliOperator], list[PauliOperator]]:
    """Measure the gauge operators of one configuration starting from the other.

    The stabilizer tableau is updated with the usual rules: a measured operator that
    anticommutes with some generators replaces the first of them, which is multiplied
    into the others. Returns the resulting code stabilizers and the operators whose
    values were inferred by the measurements but are logical for the target code (the
    measured joint logical after a split).
    """
    n = code.n
    if direction == "merge":
        start, measure = code.split, code.merged
    elif direction == "split":
        start, measure = code.merged, code.split
    else:
        msg = f"Unknown gauge-fix direction {direction!r}."
        raise SurgeryError(msg)
    s_space = code.stabilizer_space
    tableau = [p.to_bits(n) for p in start]
    measured = [p.to_bits(n) for p in measure if not s_space.contains(p.to_bits(n))]
    for m in measured:
        anti = [i for i, g in enumerate(tableau) if symplectic(g, m, n)]
        if not anti:
            tableau.append(m)
            continue
        first = anti[0]
        for i in anti[1:]:
            tableau[i] ^= tableau[first]
        tableau[first] = m
    target_gens = [p.to_bits(n) for p in code.stabilizers] + measured
    kept = intersect(tableau, target_gens, 2 * n)
    quotient = RowSpace(kept)
    inferred = [v for v in tableau if quotient.add(v)]
    return [PauliOperator.from_bits(v, n) for v in kept], [PauliOperator.from_bits(v, n) for v in inferred]


def gauge_fix(code: SubsystemCodeSpec, direction: Literal["merge", "split"]) -> list[PauliOperator]:
    """Stabilizer generators after fixing the gauge towards ``direction``."""
    return gauge_fix_detailed(code, direction)[0]
