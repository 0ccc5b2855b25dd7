"""Logical CNOT+T circuits: parsing, serialization, layering and random generation."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np

GateKind = Literal["CNOT", "T"]
Family = Literal["seq", "rand", "max"]


class CircuitError(ValueError):
    """Raised for malformed circuits or circuit sources."""


@dataclass(frozen=True, order=True)
class Gate:
    """A logical gate.

    Attributes:
        kind: Either ``"CNOT"`` or ``"T"``.
        target: Target qubit label.
        control: Control qubit label (CNOT only, ``None`` for T).
    """

    kind: GateKind
    target: int
    control: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "CNOT":
            if self.control is None:
                msg = "CNOT requires a control qubit."
                raise CircuitError(msg)
            if self.control == self.target:
                msg = f"CNOT control equals target ({self.target})."
                raise CircuitError(msg)
        elif self.kind == "T":
            if self.control is not None:
                msg = "T gate takes no control qubit."
                raise CircuitError(msg)
        else:
            msg = f"Unknown gate kind {self.kind!r}."
            raise CircuitError(msg)

    @classmethod
    def cnot(cls, control: int, target: int) -> Gate:
        return cls("CNOT", target, control)

    @classmethod
    def t(cls, target: int) -> Gate:
        return cls("T", target)

    @property
    def qubits(self) -> tuple[int, ...]:
        """Labels acted on, control first."""
        if self.control is None:
            return (self.target,)
        return (self.control, self.target)

    def __str__(self) -> str:
        if self.kind == "CNOT":
            return f"CNOT({self.control},{self.target})"
        return f"T({self.target})"


@dataclass(frozen=True)
class LogicalCircuit:
    """An ordered list of CNOT and T gates on ``num_qubits`` labels."""

    num_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.num_qubits < 0:
            msg = "num_qubits must be non-negative."
            raise CircuitError(msg)
        for i, gate in enumerate(self.gates):
            for q in gate.qubits:
                if not 0 <= q < self.num_qubits:
                    msg = f"Gate {i} ({gate}) uses label {q} outside [0, {self.num_qubits})."
                    raise CircuitError(msg)


@dataclass(frozen=True)
class IndexedGate:
    """A gate together with its position in the source circuit."""

    index: int
    gate: Gate

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.gate.qubits


@dataclass(frozen=True)
class LayeredCircuit:
    """Partition of a circuit into layers of qubit-disjoint gates."""

    num_qubits: int
    layers: tuple[tuple[IndexedGate, ...], ...] = field(default_factory=tuple)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def gates(self) -> list[IndexedGate]:
        """All gates in layer order."""
        return [g for layer in self.layers for g in layer]

    def active_labels(self) -> list[int]:
        """Sorted labels that occur in any gate."""
        return sorted({q for g in self.gates() for q in g.qubits})


def parse_circuit(text: str) -> LogicalCircuit:
    """Parse the line-oriented circuit format.

    The first non-comment line is ``qubits <n>``; every further line is ``cnot <c> <t>``
    or ``t <q>``. ``#`` starts a comment and blank lines are ignored.

    Args:
        text: Circuit source.

    Returns:
        The parsed circuit.

    Raises:
        CircuitError: On syntax errors (with line number) or invalid labels.
    """
    num_qubits: int | None = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0].lower()
        try:
            args = [int(p) for p in parts[1:]]
        except ValueError:
            msg = f"line {lineno}: non-integer argument in {line!r}"
            raise CircuitError(msg) from None
        if any(a < 0 for a in args):
            msg = f"line {lineno}: negative label in {line!r}"
            raise CircuitError(msg)
        if num_qubits is None:
            if head != "qubits" or len(args) != 1:
                msg = f"line {lineno}: expected 'qubits <n>' header, got {line!r}"
                raise CircuitError(msg)
            num_qubits = args[0]
            continue
        try:
            if head == "cnot" and len(args) == 2:
                gate = Gate.cnot(args[0], args[1])
            elif head == "t" and len(args) == 1:
                gate = Gate.t(args[0])
            else:
                msg = f"line {lineno}: cannot parse {line!r}"
                raise CircuitError(msg)
        except CircuitError as err:
            if str(err).startswith("line "):
                raise
            msg = f"line {lineno}: {err}"
            raise CircuitError(msg) from None
        for q in gate.qubits:
            if q >= num_qubits:
                msg = f"line {lineno}: label {q} >= qubit count {num_qubits}"
                raise CircuitError(msg)
        gates.append(gate)
    if num_qubits is None:
        msg = "missing 'qubits <n>' header"
        raise CircuitError(msg)
    return LogicalCircuit(num_qubits, tuple(gates))


def serialize(circuit: LogicalCircuit) -> str:
    """Write a circuit in the format read by :func:`parse_circuit`."""
    lines = [f"qubits {circuit.num_qubits}"]
    for gate in circuit.gates:
        if gate.kind == "CNOT":
            lines.append(f"cnot {gate.control} {gate.target}")
        else:
            lines.append(f"t {gate.target}")
    return "\n".join(lines) + "\n"


def layer_circuit(circuit: LogicalCircuit) -> LayeredCircuit:
    """Greedy as-soon-as-possible layering.

    Each gate goes into the layer directly after the latest layer holding an earlier
    gate on one of its qubits.
    """
    last = [-1] * circuit.num_qubits
    layers: list[list[IndexedGate]] = []
    for index, gate in enumerate(circuit.gates):
        pos = 1 + max(last[q] for q in gate.qubits)
        if pos == len(layers):
            layers.append([])
        layers[pos].append(IndexedGate(index, gate))
        for q in gate.qubits:
            last[q] = pos
    return LayeredCircuit(circuit.num_qubits, tuple(tuple(layer) for layer in layers))


def cnot_ratio(circuit: LogicalCircuit) -> Fraction:
    """Exact fraction of CNOT gates among all gates."""
    if not circuit.gates:
        msg = "CNOT ratio of an empty circuit is undefined."
        raise CircuitError(msg)
    n_cnot = sum(g.kind == "CNOT" for g in circuit.gates)
    return Fraction(n_cnot, len(circuit.gates))


@dataclass(frozen=True)
class RandomCircuitSpec:
    """Parameters of a random circuit family.

    Attributes:
        family: ``seq`` (at most two parallel gates), ``rand`` (uniform gates) or
            ``max`` (blocks of q/2 gates forming a perfect matching).
        num_qubits: Number of labels q.
        total_gates: Number of gates, defaults to 4q.
        cnot_ratio: Probability that a gate slot is a CNOT.
        seed: RNG seed.
    """

    family: Family
    num_qubits: int
    total_gates: int | None = None
    cnot_ratio: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.family not in ("seq", "rand", "max"):
            msg = f"Unknown circuit family {self.family!r}."
            raise CircuitError(msg)
        if self.total_gates is None:
            object.__setattr__(self, "total_gates", 4 * self.num_qubits)
        if self.total_gates < 0:
            msg = "total_gates must be non-negative."
            raise CircuitError(msg)
        if not 0.0 <= self.cnot_ratio <= 1.0:
            msg = "cnot_ratio must lie in [0, 1]."
            raise CircuitError(msg)
        min_q = {"seq": 4, "rand": 2, "max": 2}[self.family]
        if self.num_qubits < min_q and self.total_gates > 0:
            msg = f"Family {self.family} needs at least {min_q} qubits."
            raise CircuitError(msg)
        if self.family == "max" and self.num_qubits % 2:
            msg = "Family max requires an even number of qubits."
            raise CircuitError(msg)


def generate_random_circuit(spec: RandomCircuitSpec) -> LogicalCircuit:
    """Sample a random circuit from one of the seq/rand/max families.

    Every gate slot is first decided to be a T gate with probability ``1 - r``; the
    labels are then assigned per family. For seq and max a T gate inherits one label of
    the CNOT it replaces, so the conflict structure of the family is kept.
    """
    rng = np.random.default_rng(spec.seed)
    n, q = spec.total_gates, spec.num_qubits
    is_t = rng.random(n) >= spec.cnot_ratio
    pairs: list[tuple[int, int]] = []
    if spec.family == "rand":
        for _ in range(n):
            c, t = rng.choice(q, size=2, replace=False)
            pairs.append((int(c), int(t)))
    elif spec.family == "seq":
        block = _disjoint_pair(rng, q, ())
        while len(pairs) < n:
            pairs.extend(block)
            block = _linked_pair(rng, q, block)
        pairs = pairs[:n]
    else:
        while len(pairs) < n:
            perm = rng.permutation(q)
            pairs.extend((int(perm[2 * k]), int(perm[2 * k + 1])) for k in range(q // 2))
        pairs = pairs[:n]
    gates = []
    for slot, (c, t) in enumerate(pairs):
        if is_t[slot]:
            gates.append(Gate.t((c, t)[int(rng.integers(2))]))
        else:
            gates.append(Gate.cnot(c, t))
    return LogicalCircuit(q, tuple(gates))


def _orient(rng: np.random.Generator, a: int, b: int) -> tuple[int, int]:
    return (a, b) if rng.integers(2) == 0 else (b, a)


def _disjoint_pair(
    rng: np.random.Generator, q: int, _prev: tuple[tuple[int, int], ...]
) -> list[tuple[int, int]]:
    a, b, c, d = (int(x) for x in rng.choice(q, size=4, replace=False))
    return [(a, b), (c, d)] if q >= 4 else [(a, b)]


def _linked_pair(
    rng: np.random.Generator, q: int, prev: list[tuple[int, int]]
) -> list[tuple[int, int]]:
    """Two disjoint gates, each reusing one label of a different gate of ``prev``."""
    if len(prev) < 2:
        a, b = prev[0]
        keep = (a, b)[int(rng.integers(2))]
        other = int(rng.choice([x for x in range(q) if x not in prev[0]]))
        return [_orient(rng, keep, other)]
    keep1 = prev[0][int(rng.integers(2))]
    keep2 = prev[1][int(rng.integers(2))]
    fresh = [x for x in range(q) if x not in (keep1, keep2)]
    f1, f2 = (int(x) for x in rng.choice(fresh, size=2, replace=False))
    return [_orient(rng, keep1, f1), _orient(rng, keep2, f2)]
