from __future__ import annotations

import csv
import io
import json
import shutil
import subprocess

import pytest

from lscompile.cli import EXIT_OK, EXIT_ROUTING, EXIT_USAGE, EXIT_VERIFY, main
from lscompile.experiments import EXAMPLE_CIRCUIT


@pytest.fixture
def example(tmp_path):
    p = tmp_path / "example.txt"
    p.write_text(EXAMPLE_CIRCUIT)
    return p


def test_compile_example(example, tmp_path):
    out = tmp_path / "s.json"
    assert main(["compile", str(example), "--layout", "hexagonal", "--metric", "depth", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["depth"] == 2
    out2 = tmp_path / "s2.json"
    main(["compile", str(example), "--layout", "hexagonal", "--metric", "depth", "--out", str(out2)])
    assert out.read_bytes() == out2.read_bytes()


def test_config_precedence(example, tmp_path):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("# settings\nlayout = row\nno-mapping = true\nseed = 4\n")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["compile", str(example), "--config", str(cfg), "--out", str(a)]) == EXIT_OK
    assert main(["compile", str(example), "--layout", "row", "--no-mapping", "--seed", "4", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.json"
    # a flag overrides the config value
    assert main(["compile", str(example), "--config", str(cfg), "--seed", "5", "--out", str(c)]) == EXIT_OK
    d = tmp_path / "d.json"
    assert main(["compile", str(example), "--layout", "row", "--no-mapping", "--seed", "5", "--out", str(d)]) == EXIT_OK
    assert c.read_bytes() == d.read_bytes()
    bad = tmp_path / "bad.txt"
    bad.write_text("colour = red\n")
    assert main(["compile", str(example), "--config", str(bad)]) == EXIT_USAGE


def test_exit_codes(example, tmp_path, capsys):
    assert main([]) == EXIT_USAGE
    assert main(["compile", str(example), "--bogus"]) == EXIT_USAGE
    assert main(["compile", str(example), "--factories", "1,2"]) == EXIT_USAGE
    t = tmp_path / "t.txt"
    t.write_text("qubits 2\nt 0\ncnot 0 1\n")
    assert main(["compile", str(t), "--factories", "0"]) == EXIT_ROUTING
    assert main(["compile", str(t), "--factories", "1", "--out", str(tmp_path / "o.json")]) == EXIT_OK
    broken = tmp_path / "broken.txt"
    broken.write_text("qubits 2\ncnot 0 5\n")
    assert main(["compile", str(broken)]) == EXIT_ROUTING
    assert main(["compile", str(tmp_path / "missing.txt")]) == EXIT_ROUTING
    assert main(["verify", "--substrate", "color", "--distance", "7", "--require-exhaustive"]) == EXIT_ROUTING
    capsys.readouterr()


def test_codegen_and_verify(tmp_path, capsys):
    dump = tmp_path / "d.txt"
    assert main(["codegen", "--substrate", "color", "--distance", "3", "--out", str(dump)]) == EXIT_OK
    assert main(["verify", str(dump)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "PASS dressed distance" in out
    lines = dump.read_text().splitlines()
    i = lines.index("# merged")
    del lines[i + 4]
    bad = tmp_path / "bad.txt"
    bad.write_text("\n".join(lines) + "\n")
    assert main(["verify", str(bad)]) == EXIT_VERIFY
    assert main(["verify", "--substrate", "surface", "--distance", "3", "--basis", "XX"]) == EXIT_OK


def test_experiment_command(tmp_path):
    out, samples = tmp_path / "sum.csv", tmp_path / "rows.csv"
    argv = ["experiment", "factories", "--samples", "2", "--qubits", "8", "--restarts", "2", "--iterations", "2",
            "--factories", "1,2", "--reset-period", "2", "--metric", "crossings", "--out", str(out),
            "--samples-out", str(samples)]
    assert main(argv) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert [(r["factories"], r["reset_period"]) for r in rows] == [("1", "2"), ("2", "2")]
    assert len(list(csv.DictReader(io.StringIO(samples.read_text())))) == 4
    first = out.read_bytes()
    assert main(argv) == EXIT_OK
    assert out.read_bytes() == first
    assert main(["experiment", "factories", "--samples", "0"]) == EXIT_USAGE


@pytest.mark.skipif(shutil.which("lscompile") is None, reason="console script not installed")
def test_console_script(example):
    res = subprocess.run(["lscompile", "compile", str(example), "--no-mapping"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["depth"] >= 2
