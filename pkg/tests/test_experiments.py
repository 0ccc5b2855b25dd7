from __future__ import annotations

import csv
import io

import pytest

from lscompile.experiments import ExperimentSpec, example_circuit, example_graph, row_seed, run_experiment, sample_circuit

SMALL = {"num_qubits": 8, "samples": 3, "restarts": 2, "iterations": 3}


def test_example_instance():
    c = example_circuit()
    assert c.num_qubits == 6 and len(c.gates) == 5
    g = example_graph()
    assert len(g.data_vertices) >= 6
    assert g.layout == "hexagonal" and g.substrate == "color"


def test_parallelism_small():
    spec = ExperimentSpec.parallelism(layouts=("hexagonal", "pair"), families=("seq", "max"), **SMALL)
    report = run_experiment(spec)
    assert len(report.rows) == 2 * 2 * 3
    rows = list(csv.DictReader(io.StringIO(report.summary_csv())))
    assert len(rows) == 4
    assert {r["config"] for r in rows} == {spec.config_hash()}
    for r in rows:
        assert int(r["samples"]) == 3
    samples = list(csv.DictReader(io.StringIO(report.samples_csv())))
    assert len(samples) == 12
    for r in report.rows:
        assert r.delta_i >= 1 and r.delta_f >= 1
        assert r.improvement == pytest.approx((r.delta_i - r.delta_f) / r.delta_f)


def test_factories_small_and_row_reproduction():
    spec = ExperimentSpec.factories(factory_counts=(1, 2), reset_periods=(1, 3), **SMALL)
    report = run_experiment(spec)
    assert {r.cell for r in report.rows} == {(m, f, t) for m in ("crossings", "depth") for f in (1, 2) for t in (1, 3)}
    for r in report.rows:
        assert r.improvement == pytest.approx((r.delta_i - r.delta_f) / r.delta_i)
    # every row is reproducible from its seed alone
    row = report.rows[5]
    single = run_experiment(ExperimentSpec.factories(factory_counts=(row.cell[1],), reset_periods=(row.cell[2],),
                                                     metrics=(row.cell[0],), **SMALL))
    match = next(r for r in single.rows if r.sample == row.sample)
    assert (match.seed, match.delta_i, match.delta_f) == (row.seed, row.delta_i, row.delta_f)


def test_parallel_jobs_identical():
    spec = ExperimentSpec.parallelism(layouts=("row",), families=("rand",), **SMALL)
    a = run_experiment(spec)
    b = run_experiment(ExperimentSpec.parallelism(layouts=("row",), families=("rand",), jobs=2, **SMALL))
    assert a.summary_csv() == b.summary_csv()
    assert a.samples_csv() == b.samples_csv()


def test_seeds_and_circuits():
    assert row_seed(0, 1, 2) == row_seed(0, 1, 2) != row_seed(0, 2, 1)
    spec = ExperimentSpec.factories(num_qubits=10)
    c = sample_circuit(spec, "rand", 5)
    assert c.num_qubits == 10 and len(c.gates()) == 40
    assert ExperimentSpec.factories().config_hash() != ExperimentSpec.parallelism().config_hash()
    assert ExperimentSpec.factories(jobs=4).config_hash() == ExperimentSpec.factories().config_hash()


@pytest.mark.parametrize("kwargs", [{"preset": "foo"}, {"samples": 0}, {"preset": "factories", "factory_counts": ()},
                                    {"preset": "factories", "reset_periods": (0,)}])
def test_spec_rejects(kwargs):
    with pytest.raises(ValueError):
        ExperimentSpec(**kwargs)
