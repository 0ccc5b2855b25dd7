"""Experiment presets: circuit parallelism study and factory study.

Every sample row carries the seed it was derived from; the circuit and the hill
climbing restarts of that row are drawn from this seed alone, so any single row can be
reproduced in isolation.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Literal

import numpy as np

from .circuit import LayeredCircuit, LogicalCircuit, RandomCircuitSpec, generate_random_circuit, layer_circuit, parse_circuit
from .layouts import LayoutKind
from .mapper import Denominator, HillClimbConfig, MetricKind, hill_climb
from .routing_graph import FactoryConfig, RoutingGraph, build_routing_graph, extent_for

PresetKind = Literal["parallelism", "factories"]

EXAMPLE_CIRCUIT = """\
# Two layers of CNOTs on six qubits.
qubits 6
cnot 0 3
cnot 1 2
cnot 4 5
cnot 0 1
cnot 2 5
"""


def example_circuit() -> LogicalCircuit:
    """Six-qubit circuit with two layers of parallel CNOTs."""
    return parse_circuit(EXAMPLE_CIRCUIT)


def example_graph() -> RoutingGraph:
    """Hexagonal-layout color routing graph hosting six data patches with two factories."""
    return build_routing_graph("hexagonal", extent_for("hexagonal", 6), "color", FactoryConfig(2, 1))


@dataclass(frozen=True)
class ExperimentSpec:
    """Parameters of an experiment preset.

    Attributes:
        preset: ``parallelism`` or ``factories``.
        layouts: Layouts (parallelism preset).
        families: Circuit families (parallelism preset).
        num_qubits: Logical qubits per circuit.
        gates_per_qubit: Total gates as a multiple of ``num_qubits``.
        samples: Circuits per cell.
        restarts: Hill-climbing restarts.
        iterations: Sweeps per restart.
        metrics: Hill-climbing metrics.
        factory_counts: Factory counts (factories preset).
        reset_periods: Reset periods (factories preset).
        cnot_ratio: Fraction of CNOTs among all gates.
        layout: Layout of the factories preset.
        denominator: Improvement convention.
        seed: Base seed.
        jobs: Worker processes.
    """

    preset: PresetKind = "parallelism"
    layouts: tuple[LayoutKind, ...] = ("hexagonal", "row", "pair")
    families: tuple[str, ...] = ("seq", "rand", "max")
    num_qubits: int = 24
    gates_per_qubit: int = 4
    samples: int = 50
    restarts: int = 10
    iterations: int = 50
    metrics: tuple[MetricKind, ...] = ("crossings",)
    factory_counts: tuple[int, ...] = (1, 2, 4)
    reset_periods: tuple[int, ...] = (1, 2, 4)
    cnot_ratio: float = 1.0
    layout: LayoutKind = "row"
    denominator: Denominator = "final"
    seed: int = 0
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.preset not in ("parallelism", "factories"):
            msg = f"Unknown preset {self.preset!r}."
            raise ValueError(msg)
        if self.samples < 1 or self.num_qubits < 2 or self.gates_per_qubit < 1:
            msg = "Samples, qubits and gates per qubit must be positive."
            raise ValueError(msg)
        if self.preset == "factories" and (
            not self.factory_counts or not self.reset_periods
            or min(self.factory_counts) < 1 or min(self.reset_periods) < 1
        ):
            msg = "The factory grid needs positive factory counts and reset periods."
            raise ValueError(msg)

    @classmethod
    def parallelism(cls, **overrides) -> ExperimentSpec:
        """Defaults of the parallelism study: CNOT-only circuits, crossing metric."""
        return replace(cls(preset="parallelism"), **overrides)

    @classmethod
    def factories(cls, **overrides) -> ExperimentSpec:
        """Defaults of the factory study: random circuits with 80% CNOTs on the row layout."""
        base = cls(preset="factories", families=("rand",), metrics=("crossings", "depth"), cnot_ratio=0.8,
                   denominator="initial")
        return replace(base, **overrides)

    def config_hash(self) -> str:
        text = json.dumps(asdict(self) | {"jobs": None}, sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SampleRow:
    """One hill-climbing run."""

    cell: tuple
    sample: int
    seed: int
    delta_i: int
    delta_f: int
    improvement: float


@dataclass
class RunReport:
    """Per-sample rows and per-cell aggregates of an experiment."""

    spec: ExperimentSpec
    keys: tuple[str, ...]
    rows: list[SampleRow] = field(default_factory=list)

    def cells(self) -> list[tuple]:
        return sorted({r.cell for r in self.rows})

    def aggregate(self) -> list[dict]:
        out = []
        for cell in self.cells():
            rows = [r for r in self.rows if r.cell == cell]
            entry = dict(zip(self.keys, cell))
            entry["samples"] = len(rows)
            for name in ("improvement", "delta_i", "delta_f"):
                vals = np.array([getattr(r, name) for r in rows], dtype=float)
                entry[f"mean_{name}"] = float(vals.mean())
                entry[f"stderr_{name}"] = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else None
            entry["seed"] = self.spec.seed
            out.append(entry)
        return out

    def summary_csv(self) -> str:
        stats = [f"{p}_{n}" for n in ("improvement", "delta_f", "delta_i") for p in ("mean", "stderr")]
        header = ["preset", *self.keys, "samples", *stats, "denominator", "seed", "config"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for entry in self.aggregate():
            row = [self.spec.preset, *(entry[k] for k in self.keys), entry["samples"]]
            row += [_fmt(entry[s]) for s in stats]
            row += [self.spec.denominator, entry["seed"], self.spec.config_hash()]
            w.writerow(row)
        return buf.getvalue()

    def samples_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["preset", *self.keys, "sample", "seed", "delta_i", "delta_f", "improvement"])
        for r in sorted(self.rows, key=lambda r: (r.cell, r.sample)):
            w.writerow([self.spec.preset, *r.cell, r.sample, r.seed, r.delta_i, r.delta_f, _fmt(r.improvement)])
        return buf.getvalue()

    def mean(self, name: str, **cell) -> float:
        """Mean of a sample field over the rows matching ``cell``."""
        rows = [r for r in self.rows if all(dict(zip(self.keys, r.cell))[k] == v for k, v in cell.items())]
        return float(np.mean([getattr(r, name) for r in rows]))


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.6f}"


def row_seed(base: int, *parts: int) -> int:
    """Seed of a sample row derived from the base seed and its cell/sample indices."""
    return int(np.random.SeedSequence([base, *parts]).generate_state(1)[0])


def sample_circuit(spec: ExperimentSpec, family: str, seed: int) -> LayeredCircuit:
    q = spec.num_qubits
    rc = RandomCircuitSpec(family, q, spec.gates_per_qubit * q, spec.cnot_ratio, seed)
    return layer_circuit(generate_random_circuit(rc))


_GRAPHS: dict[tuple, RoutingGraph] = {}


def _graph(layout: LayoutKind, q: int, factories: int) -> RoutingGraph:
    key = (layout, q, factories)
    if key not in _GRAPHS:
        _GRAPHS[key] = build_routing_graph(layout, extent_for(layout, q), "color", FactoryConfig(factories, 1))
    return _GRAPHS[key]


def _run_task(task: tuple) -> SampleRow:
    spec, cell, family, layout, metric, factories, reset, sample, seed = task
    layered = sample_circuit(spec, family, seed)
    g = _graph(layout, spec.num_qubits, factories)
    cfg = HillClimbConfig(spec.restarts, spec.iterations, metric, seed)
    res = hill_climb(g, layered, cfg, reset_period=reset, denominator=spec.denominator)
    return SampleRow(cell, sample, seed, res.initial_depth, res.final_depth, float(res.improvement))


def _tasks(spec: ExperimentSpec) -> tuple[tuple[str, ...], list[tuple]]:
    tasks = []
    if spec.preset == "parallelism":
        keys = ("layout", "family", "metric")
        for fi, family in enumerate(spec.families):
            for layout in spec.layouts:
                for metric in spec.metrics:
                    for s in range(spec.samples):
                        seed = row_seed(spec.seed, fi, s)
                        tasks.append((spec, (layout, family, metric), family, layout, metric, 0, 1, s, seed))
        return keys, tasks
    keys = ("metric", "factories", "reset_period")
    family = spec.families[0]
    for metric in spec.metrics:
        for f in spec.factory_counts:
            for t in spec.reset_periods:
                for s in range(spec.samples):
                    seed = row_seed(spec.seed, s)
                    tasks.append((spec, (metric, f, t), family, spec.layout, metric, f, t, s, seed))
    return keys, tasks


def run_experiment(spec: ExperimentSpec) -> RunReport:
    """Run every sample of a preset; circuits are shared across the cells of a sample index."""
    keys, tasks = _tasks(spec)
    if spec.jobs > 1:
        with ProcessPoolExecutor(spec.jobs) as pool:
            rows = list(pool.map(_run_task, tasks, chunksize=4))
    else:
        rows = [_run_task(t) for t in tasks]
    return RunReport(spec, keys, rows)
