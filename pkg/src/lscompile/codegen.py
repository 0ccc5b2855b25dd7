"""Stabilizer dumps and the verification suite for lattice-surgery merges."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .distance import DistanceResult, verify_distance
from .layouts import DOWN, UP
from .pauli import PauliOperator, RowSpace, product, same_span, symplectic
from .surgery import (
    MergeSpec,
    SubsystemCodeSpec,
    SurgeryError,
    build_subsystem_code,
    coverage_counts,
    gauge_fix,
    merge_layout,
    select_measurement_subset,
)


def color_instance(d: int = 5, basis: str = "ZZ") -> MergeSpec:
    """Two color-code patches joined through one intermediate ancilla patch."""
    return MergeSpec("color", d, (UP, 0, 0), (UP, 1, 0), ((DOWN, 0, 0),), basis)


def surface_instance(d: int = 3, basis: str = "ZZ", snake_length: int = 1) -> MergeSpec:
    """A surface-code patch merged with a folded patch through a straight snake."""
    snake = tuple((DOWN, k, 0) for k in range(snake_length))
    return MergeSpec("surface", d, (UP, 0, 0), (UP, snake_length, 0), snake, basis)


@dataclass
class MergeData:
    """Everything written to a stabilizer dump.

    Attributes:
        n: Number of qubits.
        qubits: Qubit coordinates.
        split: Split generators.
        merged: Merged generators.
        strings: Extra gauge strings of the subsystem code.
        m_indices: Positions of M within ``merged``.
        target: Joint logical operator.
        logical_qubits: Qubits of the two logical patches.
        header: Merge description.
    """

    n: int
    qubits: list[list[int]]
    split: list[PauliOperator]
    merged: list[PauliOperator]
    strings: list[PauliOperator]
    m_indices: list[int]
    target: PauliOperator
    logical_qubits: list[int]
    header: dict = field(default_factory=dict)


def merge_data(spec: MergeSpec) -> MergeData:
    layout = merge_layout(spec)
    code = build_subsystem_code(layout.split, layout.merged, layout.n)
    subset = select_measurement_subset(spec)
    header = {
        "substrate": spec.substrate,
        "d": spec.d,
        "basis": spec.basis,
        "chain": [list(t) for t in spec.chain],
        "logical_ancilla_slot": list(spec.logical_ancilla_slot),
    }
    return MergeData(
        layout.n, [list(q) for q in layout.qubits], list(layout.split), list(layout.merged), list(code.strings),
        list(subset.indices), layout.target, sorted(layout.logical_qubits), header,
    )


def _tag(op: PauliOperator, n: int, s_space: RowSpace, intermediary: set[PauliOperator], in_m: bool) -> str:
    if in_m:
        return "M"
    if op in intermediary:
        return "I"
    if s_space.contains(op.to_bits(n)):
        return "S"
    return "G"


def dump(data: MergeData) -> str:
    """Render the stabilizer dump.

    The dump starts with a JSON header comment carrying the merge description, the qubit
    coordinates, the target logical and the logical-patch qubits. Three sections follow
    (``# split``, ``# merged``, ``# strings``) with one operator per line in the form
    ``X:{...} Z:{...} T`` where ``T`` is ``S`` (stabilizer), ``G`` (gauge), ``I``
    (intermediary check fixed by the merge) or ``M`` (measurement subset).
    """
    code = build_subsystem_code(data.split, data.merged, data.n)
    s_space = code.stabilizer_space
    inter = set(code.intermediary)
    head = dict(data.header)
    head.update({
        "n": data.n,
        "qubits": data.qubits,
        "target": str(data.target),
        "logical_qubits": data.logical_qubits,
    })
    lines = ["# " + json.dumps(head, sort_keys=True), "# split"]
    lines += [f"{op} {_tag(op, data.n, s_space, set(), False)}" for op in data.split]
    lines.append("# merged")
    m = set(data.m_indices)
    lines += [f"{op} {_tag(op, data.n, s_space, inter, i in m)}" for i, op in enumerate(data.merged)]
    lines.append("# strings")
    lines += [f"{op} G" for op in data.strings]
    return "\n".join(lines) + "\n"


def _parse_op(text: str) -> PauliOperator:
    xs, zs = text.split("Z:")
    xs = xs.strip()[2:].strip("{} ")
    zs = zs.strip().strip("{} ")
    return PauliOperator(frozenset(int(q) for q in xs.split()), frozenset(int(q) for q in zs.split()))


def parse_dump(text: str) -> MergeData:
    """Read a dump written by :func:`dump`.

    Raises:
        ValueError: On malformed input.
    """
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# {"):
        msg = "Dump must start with a JSON header comment."
        raise ValueError(msg)
    head = json.loads(lines[0][2:])
    sections: dict[str, list[tuple[PauliOperator, str]]] = {"split": [], "merged": [], "strings": []}
    current = None
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            name = line[1:].strip()
            if name not in sections:
                msg = f"line {lineno}: unknown section {name!r}"
                raise ValueError(msg)
            current = name
            continue
        if current is None:
            msg = f"line {lineno}: operator outside a section"
            raise ValueError(msg)
        try:
            body, tag = line.rsplit(" ", 1)
            op = _parse_op(body)
        except ValueError:
            msg = f"line {lineno}: cannot parse operator {line!r}"
            raise ValueError(msg) from None
        if tag not in ("S", "G", "I", "M"):
            msg = f"line {lineno}: unknown tag {tag!r}"
            raise ValueError(msg)
        sections[current].append((op, tag))
    n = head["n"]
    merged = [op for op, _ in sections["merged"]]
    return MergeData(
        n, head["qubits"], [op for op, _ in sections["split"]], merged, [op for op, _ in sections["strings"]],
        [i for i, (_, tag) in enumerate(sections["merged"]) if tag == "M"], _parse_op(head["target"]),
        head["logical_qubits"], {k: head[k] for k in ("substrate", "d", "basis", "chain", "logical_ancilla_slot") if k in head},
    )


@dataclass
class CheckReport:
    """Results of the verification suite, one entry per named check."""

    checks: dict[str, bool] = field(default_factory=dict)
    details: dict[str, str] = field(default_factory=dict)
    distance: DistanceResult | None = None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def lines(self) -> list[str]:
        out = []
        for name, passed in self.checks.items():
            extra = self.details.get(name, "")
            out.append(f"{'PASS' if passed else 'FAIL'} {name}" + (f": {extra}" if extra else ""))
        return out


def _commuting(ops: list[PauliOperator], n: int) -> bool:
    bits = [p.to_bits(n) for p in ops]
    return all(not symplectic(a, b, n) for i, a in enumerate(bits) for b in bits[i + 1:])


def verify_merge_data(
    data: MergeData, d_target: int, max_enumeration: int | None = None, seed: int = 0
) -> CheckReport:
    """Run every microscopic check on merge data.

    Checks: internal commutation of both configurations, S as the row-space intersection,
    S central in the gauge group, each intermediary check anticommuting with its partner,
    the product of M equal to the target logical, qubit-wise parity of M, the gauge-fix
    round trip, the distances of the split and merged stabilizer codes and the dressed
    distance of the subsystem code.
    """
    n = data.n
    report = CheckReport()
    report.checks["split commute"] = _commuting(data.split, n)
    report.checks["merged commute"] = _commuting(data.merged, n)
    if not (report.checks["split commute"] and report.checks["merged commute"]):
        return report
    code = build_subsystem_code(data.split, data.merged, n)
    code.strings = list(data.strings) or code.strings
    s_bits = [p.to_bits(n) for p in code.stabilizers]
    split_space = RowSpace(p.to_bits(n) for p in data.split)
    merged_space = RowSpace(p.to_bits(n) for p in data.merged)
    report.checks["S = split ∩ merged"] = all(split_space.contains(v) and merged_space.contains(v) for v in s_bits)
    gauge = [p.to_bits(n) for p in code.gauge_generators] + [p.to_bits(n) for p in code.intermediary]
    report.checks["S central"] = all(not symplectic(s, g, n) for s in s_bits for g in gauge)
    report.checks["I has partners"] = all(
        not p.commutes(data.split[j]) for p, j in zip(code.intermediary, code.partners)
    ) and len(code.partners) == len(code.intermediary)
    m_ops = [data.merged[i] for i in data.m_indices]
    prod = product(m_ops)
    report.checks["M product = target"] = prod == data.target
    if prod != data.target:
        report.details["M product = target"] = f"differs on qubits {sorted(prod.support ^ data.target.support)}"
    counts = coverage_counts(m_ops, n)
    inner = data.target.support
    bad = [q for q in range(n) if (counts[q] != 1 if q in inner else counts[q] % 2)]
    report.checks["M parity"] = not bad
    if bad:
        report.details["M parity"] = f"qubits {bad}"
    merged_fix = gauge_fix(code, "merge")
    roundtrip = build_subsystem_code(data.split, [*merged_fix], n)
    split_fix = gauge_fix(roundtrip, "split")
    report.checks["gauge fix round trip"] = same_span(
        [p.to_bits(n) for p in merged_fix], [p.to_bits(n) for p in data.merged]
    ) and same_span([p.to_bits(n) for p in split_fix], [p.to_bits(n) for p in data.split])
    kwargs = {} if max_enumeration is None else {"max_enumeration": max_enumeration}
    for name, ops in (("split distance", data.split), ("merged distance", data.merged)):
        res = verify_distance(build_subsystem_code(ops, ops, n), d_target, seed=seed, **kwargs)
        report.checks[name] = res.ok
        if not res.ok:
            report.details[name] = f"weight-{res.min_weight} witness {res.witness}"
        elif not res.exhaustive:
            report.details[name] = "bounded search only"
    result = verify_distance(code, d_target, seed=seed, **kwargs)
    report.distance = result
    report.checks["dressed distance"] = result.ok
    if not result.ok:
        report.details["dressed distance"] = f"weight-{result.min_weight} witness {result.witness}"
    elif not result.exhaustive:
        report.details["dressed distance"] = "bounded search only"
    return report


def verify_merge(spec: MergeSpec, d_target: int | None = None, **kwargs) -> CheckReport:
    try:
        data = merge_data(spec)
    except SurgeryError as err:
        report = CheckReport()
        report.checks["construction"] = False
        report.details["construction"] = str(err)
        return report
    return verify_merge_data(data, spec.d if d_target is None else d_target, **kwargs)


def subsystem_code(data: MergeData) -> SubsystemCodeSpec:
    return build_subsystem_code(data.split, data.merged, data.n)
