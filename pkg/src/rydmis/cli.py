"""Command line front end.

Four subcommands: ``solve`` runs one method on one instance, ``compare``
runs several, ``gen`` writes a random instance file and ``validate`` checks
an instance against device constraints without solving anything.

Reports are JSON; histograms are plot-ready CSV.  The exit code is nonzero
only when the pipeline itself fails -- poor solution quality, constraint
violations found by ``validate`` and infeasible global plans are results,
not errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .analysis import ExperimentConfig, compare_methods, run_experiment
from .detuning import DMM_POLICIES, METHODS
from .instances import generate_instance, load_instance
from .model import DEFAULT_DEVICE, validate_register

__all__ = ["main", "build_parser"]


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("instance", help="instance JSON file")
    p.add_argument(
        "--config",
        help="JSON file of run options; explicit flags override its entries",
    )
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--dmm-policy", dest="dmm_policy", choices=DMM_POLICIES)
    p.add_argument("--tau", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--omega-max", dest="omega_max", type=float)
    p.add_argument("--duration-ns", dest="duration_ns", type=float)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--margin", type=float)
    p.add_argument("--dt-ns", dest="dt_ns", type=float)
    p.add_argument(
        "--hardware-fidelity",
        dest="hardware_fidelity",
        action="store_true",
        default=None,
        help="cap shots at the device submission limit",
    )
    p.add_argument(
        "--allow-invalid-register",
        dest="allow_invalid_register",
        action="store_true",
        default=None,
        help="solve even when the register violates device constraints",
    )
    p.add_argument("--out", help="report JSON path (default: stdout)")


_CONFIG_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    options: dict = {}
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ValueError("config file must hold a JSON object")
        unknown = set(loaded) - _CONFIG_FIELDS
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        options.update(loaded)
    for name in _CONFIG_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            options[name] = value
    options["instance"] = args.instance
    return ExperimentConfig(**options)


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _hist_path(out: str | None, suffix: str) -> Path | None:
    if out is None:
        return None
    base = Path(out)
    return base.with_name(base.stem + suffix)


def _cmd_solve(args: argparse.Namespace) -> int:
    config = _build_config(args)
    report = run_experiment(config)
    hist_file = None
    if report.histogram is not None:
        path = _hist_path(args.out, ".hist.csv")
        if args.histogram:
            path = Path(args.histogram)
        if path is not None:
            path.write_text(report.histogram.to_csv())
            hist_file = str(path)
    _emit(report.to_json_dict(histogram_file=hist_file), args.out)
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    config = _build_config(args)
    methods = None
    if args.methods:
        methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
        for m in methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
    table = compare_methods(config, methods)
    for row in table.rows:
        rep = row.report
        if rep is None or rep.histogram is None:
            continue
        path = _hist_path(args.out, f".{row.method}.hist.csv")
        if path is not None:
            path.write_text(rep.histogram.to_csv())
    _emit(table.to_json_dict(), args.out)
    if args.out:
        print(table.to_text())
    return 0


def _cmd_gen(args: argparse.Namespace) -> int:
    data = generate_instance(
        n=args.n,
        density=args.density,
        weighted=args.weighted,
        seed=args.seed,
        omega=args.omega,
        duration_ns=args.duration_ns,
    )
    _emit(data, args.out)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    device = inst.device_for(DEFAULT_DEVICE)
    violations = validate_register(inst.register, device)
    payload = {
        "instance": args.instance,
        "atoms": inst.register.n,
        "edges": sorted(sorted(e) for e in inst.graph.edges),
        "weighted": inst.is_weighted,
        "adjacency_declared": inst.adjacency_declared,
        "valid": not violations,
        "violations": [v.to_json_dict() for v in violations],
    }
    _emit(payload, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydmis",
        description=(
            "Solve maximum (weighted) independent set problems by emulating "
            "detuning-shaped adiabatic sweeps on a neutral-atom array"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run one method on an instance")
    _add_config_flags(p_solve)
    p_solve.add_argument("--histogram", help="histogram CSV path")
    p_solve.set_defaults(func=_cmd_solve)

    p_cmp = sub.add_parser("compare", help="run several methods on an instance")
    _add_config_flags(p_cmp)
    p_cmp.add_argument(
        "--methods",
        help="comma-separated subset of: " + ", ".join(METHODS),
    )
    p_cmp.set_defaults(func=_cmd_compare)

    p_gen = sub.add_parser("gen", help="generate a random instance file")
    p_gen.add_argument("--n", type=int, required=True, help="atom count")
    p_gen.add_argument("--density", type=float, default=0.5)
    p_gen.add_argument("--weighted", action="store_true")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--omega", type=float, default=12.0)
    p_gen.add_argument("--duration-ns", dest="duration_ns", type=float, default=6000.0)
    p_gen.add_argument("--out", help="instance JSON path (default: stdout)")
    p_gen.set_defaults(func=_cmd_gen)

    p_val = sub.add_parser(
        "validate", help="check an instance against device constraints"
    )
    p_val.add_argument("instance", help="instance JSON file")
    p_val.add_argument("--out", help="result JSON path (default: stdout)")
    p_val.set_defaults(func=_cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        # PipelineError, capacity and constraint errors all land here;
        # anything else is a bug and may traceback.
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
