"""Command-line interface: ``compile``, ``experiment``, ``codegen`` and ``verify``.

Option values are resolved as command-line flag, then config file, then default. The
config file is a flat ``key = value`` text file whose keys are the long flag names
(with ``-`` or ``_``); ``#`` starts a comment.

Exit codes: 0 success, 1 usage error, 2 routing or configuration error, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from .circuit import CircuitError, layer_circuit, parse_circuit
from .routing_graph import FactoryConfig, RoutingGraphError, build_routing_graph, extent_for, random_labeling
from .surgery import SurgeryError

EXIT_OK, EXIT_USAGE, EXIT_ROUTING, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    """Invalid command-line usage."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D102
        raise UsageError(message)


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in str(text).split(",") if x.strip())


def _bool(text: str | bool) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    msg = f"Not a boolean: {text!r}."
    raise UsageError(msg)


# name -> (type, default) for every option that may also come from a config file
OPTIONS: dict[str, tuple[Callable, object]] = {
    "layout": (str, "hexagonal"),
    "substrate": (str, "color"),
    "distance": (int, 3),
    "factories": (str, None),
    "reset_period": (str, None),
    "metric": (str, None),
    "restarts": (int, 10),
    "iterations": (int, 50),
    "seed": (int, 0),
    "denominator": (str, None),
    "out": (str, None),
    "extent": (str, None),
    "no_mapping": (_bool, False),
    "cold_start": (_bool, True),
    "samples": (int, None),
    "qubits": (int, 24),
    "layouts": (str, "hexagonal,row,pair"),
    "families": (str, "seq,rand,max"),
    "jobs": (int, 1),
    "samples_out": (str, None),
    "basis": (str, "ZZ"),
    "snake_length": (int, 1),
    "target_distance": (int, None),
    "max_enumeration": (int, None),
    "require_exhaustive": (_bool, False),
}


def read_config(path: str | Path) -> dict[str, str]:
    """Parse a flat ``key = value`` config file."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            msg = f"{path}:{lineno}: expected 'key = value'."
            raise UsageError(msg)
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in OPTIONS:
            msg = f"{path}:{lineno}: unknown key {key!r}."
            raise UsageError(msg)
        out[key] = value
    return out


def resolve(args: argparse.Namespace) -> dict[str, object]:
    """Merge flags, config file and defaults (in that order of precedence)."""
    config = read_config(args.config) if getattr(args, "config", None) else {}
    out: dict[str, object] = {}
    for name, (conv, default) in OPTIONS.items():
        value = getattr(args, name, None)
        if value is None and name in config:
            try:
                value = conv(config[name])
            except ValueError as err:
                msg = f"Invalid config value for {name}: {err}"
                raise UsageError(msg) from err
        out[name] = default if value is None else value
    return out


def _add_shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--layout", choices=("hexagonal", "row", "pair"))
    p.add_argument("--substrate", choices=("color", "surface"))
    p.add_argument("--distance", type=int)
    p.add_argument("--factories", help="factory count (comma list for experiments)")
    p.add_argument("--reset-period", dest="reset_period", help="reset period (comma list for experiments)")
    p.add_argument("--metric", help="crossings or depth (comma list for experiments)")
    p.add_argument("--restarts", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--denominator", choices=("final", "initial"))
    p.add_argument("--out", help="output path (stdout when omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lscompile", description="Lattice-surgery compilation on color and surface codes.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("compile", help="map and route a circuit file")
    p.add_argument("circuit", help="circuit file")
    _add_shared(p)
    p.add_argument("--extent", help="routing graph extent WxH (smallest fitting square by default)")
    p.add_argument("--no-mapping", dest="no_mapping", action="store_const", const=True,
                   help="route under a seeded random placement")
    p.add_argument("--warm-start", dest="cold_start", action="store_const", const=False,
                   help="factories start available")

    p = sub.add_parser("experiment", help="run an experiment preset")
    p.add_argument("preset", choices=("parallelism", "factories"))
    _add_shared(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--qubits", type=int)
    p.add_argument("--layouts")
    p.add_argument("--families")
    p.add_argument("--jobs", type=int)
    p.add_argument("--samples-out", dest="samples_out", help="per-sample CSV path")

    p = sub.add_parser("codegen", help="emit the stabilizer dump of a merge instance")
    _add_shared(p)
    p.add_argument("--basis", choices=("ZZ", "XX"))
    p.add_argument("--snake-length", dest="snake_length", type=int)

    p = sub.add_parser("verify", help="run the microscopic verification suite")
    p.add_argument("dump", nargs="?", help="stabilizer dump (merge instance from flags when omitted)")
    _add_shared(p)
    p.add_argument("--basis", choices=("ZZ", "XX"))
    p.add_argument("--snake-length", dest="snake_length", type=int)
    p.add_argument("--target-distance", dest="target_distance", type=int)
    p.add_argument("--max-enumeration", dest="max_enumeration", type=int)
    p.add_argument("--require-exhaustive", dest="require_exhaustive", action="store_const", const=True)
    return parser


def _emit(text: str, path: object) -> None:
    if path:
        Path(str(path)).write_text(text)
    else:
        sys.stdout.write(text)


def _single(value: object, name: str, default: int) -> int:
    if value is None:
        return default
    vals = _int_list(str(value))
    if len(vals) != 1:
        msg = f"--{name.replace('_', '-')} takes a single value here."
        raise UsageError(msg)
    return vals[0]


def cmd_compile(args: argparse.Namespace, opts: dict) -> int:
    from .mapper import HillClimbConfig, hill_climb
    from .router import RoutingTask, route_circuit

    circuit = parse_circuit(Path(args.circuit).read_text())
    layered = layer_circuit(circuit)
    f = _single(opts["factories"], "factories", 2)
    t = _single(opts["reset_period"], "reset_period", 1)
    metric = str(opts["metric"] or "crossings")
    if metric not in ("crossings", "depth"):
        msg = f"Unknown metric {metric!r}."
        raise UsageError(msg)
    layout = str(opts["layout"])
    if opts["extent"]:
        w, h = (int(x) for x in str(opts["extent"]).lower().split("x"))
        extent = (w, h)
    else:
        extent = extent_for(layout, circuit.num_qubits)
    g = build_routing_graph(layout, extent, str(opts["substrate"]), FactoryConfig(f, t), min_data=circuit.num_qubits)
    if opts["no_mapping"]:
        labeling = random_labeling(g, circuit.num_qubits, int(opts["seed"]))
        summary = "mapping: random"
    else:
        cfg = HillClimbConfig(int(opts["restarts"]), int(opts["iterations"]), metric, int(opts["seed"]))
        res = hill_climb(g, layered, cfg, reset_period=t, cold_start=bool(opts["cold_start"]),
                         denominator=str(opts["denominator"] or "final"))
        labeling = res.labeling
        summary = f"mapping: {metric} cost {res.cost}, initial depth {res.initial_depth}"
    schedule = route_circuit(RoutingTask(g, labeling, layered, t, bool(opts["cold_start"])))
    _emit(schedule.to_json() + "\n", opts["out"])
    print(f"{summary}; layers {layered.depth}; depth {schedule.depth}", file=sys.stderr if not opts["out"] else sys.stdout)
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace, opts: dict) -> int:
    from .experiments import ExperimentSpec, run_experiment

    make = ExperimentSpec.parallelism if args.preset == "parallelism" else ExperimentSpec.factories
    overrides: dict = {
        "num_qubits": int(opts["qubits"]),
        "restarts": int(opts["restarts"]),
        "iterations": int(opts["iterations"]),
        "seed": int(opts["seed"]),
        "jobs": int(opts["jobs"]),
    }
    if opts["samples"] is not None:
        overrides["samples"] = int(opts["samples"])
    if opts["metric"]:
        overrides["metrics"] = _str_list(str(opts["metric"]))
    if opts["denominator"]:
        overrides["denominator"] = opts["denominator"]
    if args.preset == "parallelism":
        overrides["layouts"] = _str_list(str(opts["layouts"]))
        overrides["families"] = _str_list(str(opts["families"]))
    else:
        if args.layout:
            overrides["layout"] = args.layout
        if opts["factories"]:
            overrides["factory_counts"] = _int_list(str(opts["factories"]))
        if opts["reset_period"]:
            overrides["reset_periods"] = _int_list(str(opts["reset_period"]))
    try:
        spec = make(**overrides)
    except ValueError as err:
        raise UsageError(str(err)) from err
    report = run_experiment(spec)
    _emit(report.summary_csv(), opts["out"])
    if opts["samples_out"]:
        Path(str(opts["samples_out"])).write_text(report.samples_csv())
    return EXIT_OK


def _merge_spec(opts: dict):
    from .codegen import color_instance, surface_instance

    d = int(opts["distance"])
    if opts["substrate"] == "color":
        return color_instance(d, str(opts["basis"]))
    return surface_instance(d, str(opts["basis"]), int(opts["snake_length"]))


def cmd_codegen(args: argparse.Namespace, opts: dict) -> int:
    from .codegen import dump, merge_data

    _emit(dump(merge_data(_merge_spec(opts))), opts["out"])
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, opts: dict) -> int:
    from .codegen import merge_data, parse_dump, verify_merge_data
    from .distance import SearchBoundExceeded

    if args.dump:
        data = parse_dump(Path(args.dump).read_text())
        d_default = int(data.header.get("d", opts["distance"]))
    else:
        data = merge_data(_merge_spec(opts))
        d_default = int(opts["distance"])
    d_target = int(opts["target_distance"] or d_default)
    max_enum = opts["max_enumeration"]
    if opts["require_exhaustive"]:
        from math import comb

        from .distance import DEFAULT_MAX_ENUMERATION

        bound = int(max_enum or DEFAULT_MAX_ENUMERATION)
        if sum(comb(data.n, w - 1) for w in range(1, d_target)) * 2 > bound:
            msg = f"Exhaustive search below weight {d_target} on {data.n} qubits exceeds the bound."
            raise SearchBoundExceeded(msg)
    report = verify_merge_data(data, d_target, max_enumeration=None if max_enum is None else int(max_enum),
                               seed=int(opts["seed"]))
    lines = report.lines()
    lines.append(f"{'PASS' if report.ok else 'FAIL'}: {data.n} qubits, target distance {d_target}")
    _emit("\n".join(lines) + "\n", opts["out"])
    return EXIT_OK if report.ok else EXIT_VERIFY


COMMANDS = {"compile": cmd_compile, "experiment": cmd_experiment, "codegen": cmd_codegen, "verify": cmd_verify}


def main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return the exit code."""
    from .distance import SearchBoundExceeded
    from .router import RoutingError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        opts = resolve(args)
        return COMMANDS[args.command](args, opts)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except SearchBoundExceeded as err:
        print(f"search bound exceeded: {err}", file=sys.stderr)
        return EXIT_ROUTING
    except (RoutingError, RoutingGraphError, CircuitError, SurgeryError, ValueError, OSError) as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_ROUTING


if __name__ == "__main__":
    sys.exit(main())
