"""Command-line front end.

Subcommands ``transport``, ``phases``, ``classify`` and ``identities`` run
adaptive transport on the configured model and add the corresponding report
sections; ``table`` lists the endpoint-permutation table for a dimension;
``demo`` runs canned configurations of the worked examples.

Exit codes: 0 success, 2 configuration error, 3 computational error
(degeneracy, lost tracking, no convergence, undefined phases),
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__, report
from .config import FORMATS, RunConfig, Tolerances, load_config
from .errors import (
    ComputationError,
    ConfigError,
    DimensionTooLarge,
    GeophaseError,
    IndexOutOfRange,
    InvariantViolation,
    NonHermitianInput,
)
from .models import ModelDescriptor, parse_angle
from .transport import TransportSettings

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_INTERNAL = 0, 2, 3, 4

DEMOS = {
    "spin": {
        "model": {"name": "spin_half", "parameters": {"theta_f": math.pi}},
        "outputs": ["U", "sigmas", "gammas", "independent_set", "classification"],
    },
    "conical": {
        "model": {"name": "conical", "parameters": {"preset": "conical3", "theta_span": [0.0, math.pi]}},
        "outputs": ["U", "sigmas", "gammas", "independent_set", "classification"],
    },
    "crossing": {
        "model": {"name": "avoided_crossing", "parameters": {"delta": 1e-4}},
        "outputs": ["U", "sigmas", "classification"],
    },
}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, InvariantViolation):
        return EXIT_INTERNAL
    if isinstance(exc, ComputationError):
        return EXIT_COMPUTE
    if isinstance(exc, (ConfigError, NonHermitianInput, IndexOutOfRange, DimensionTooLarge)):
        return EXIT_CONFIG
    return EXIT_INTERNAL


def _common(p: argparse.ArgumentParser, run: bool = True) -> None:
    p.add_argument("--format", choices=FORMATS, default=None, help="output format (default: config value or text)")
    p.add_argument("--output", "-o", default=None, metavar="FILE", help="write the report here instead of stdout")
    if not run:
        return
    p.add_argument("--steps", type=int, default=None, help="initial number of transport steps")
    p.add_argument("--tol", type=float, default=None, help="target convergence tolerance")
    p.add_argument("--undef-tol", type=float, default=None, help="overlap magnitude below which a phase is undefined")
    p.add_argument("--dominance", type=float, default=None, help="dominance factor for permutation detection")
    p.add_argument("--seed", type=int, default=None, help="seed for the random_symmetric model")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geophase", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("transport", "transport the eigenframe and print U with diagnostics"),
        ("phases", "sigma matrix, all cyclic gamma factors and the independent set"),
        ("classify", "endpoint permutation, well-defined factors and determinant rule"),
        ("identities", "residuals of the exact relations among gamma factors"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", "-c", default=None, metavar="JSON", help="run configuration file")
        p.add_argument("--model", default=None, help="model name (instead of, or overriding, the config)")
        p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                       help="model parameter; VALUE is JSON or an angle such as pi/2 (repeatable)")
        _common(p)
    p = sub.add_parser("table", help="table of endpoint permutations for dimension n")
    p.add_argument("n", type=int)
    p.add_argument("--expand", dest="expand", action="store_true", default=None, help="list every permutation")
    p.add_argument("--group", dest="expand", action="store_false", help="one row per cycle type")
    _common(p, run=False)
    p = sub.add_parser("demo", help="canned worked examples")
    p.add_argument("name", choices=sorted(DEMOS))
    _common(p)
    return parser


def _parse_param(text: str):
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ConfigError(f"expected KEY=VALUE, got {text!r}", "--param")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = parse_angle(raw, f"model.parameters.{key}")
    return key, value


def config_from_args(args) -> RunConfig:
    """Merge ``--config`` with command-line overrides into a validated config."""
    if args.command == "demo":
        data = json.loads(json.dumps(DEMOS[args.name]))
    elif args.config:
        data = load_config(args.config).to_dict()
    elif args.model:
        data = {"model": {"name": args.model, "parameters": {}}}
    else:
        raise ConfigError("give --config FILE or --model NAME", "model")
    if getattr(args, "model", None) and args.config:
        data["model"] = {"name": args.model, "parameters": {}}
    for item in getattr(args, "param", []):
        key, value = _parse_param(item)
        data["model"].setdefault("parameters", {})[key] = value
    cfg = RunConfig.from_dict(data)
    t = cfg.transport
    if args.steps is not None:
        t = TransportSettings(args.steps, max(t.max_steps, args.steps), t.target_tol, t.gap_tol)
    if args.tol is not None:
        t = TransportSettings(t.initial_steps, t.max_steps, args.tol, t.gap_tol)
    cfg.transport = t
    if args.undef_tol is not None or args.dominance is not None:
        cfg.tolerances = Tolerances(
            args.undef_tol if args.undef_tol is not None else cfg.tolerances.undef_tol,
            args.dominance if args.dominance is not None else cfg.tolerances.dominance_factor,
        )
    if args.seed is not None:
        if cfg.model.name != "random_symmetric":
            raise ConfigError("--seed applies only to the random_symmetric model", "--seed")
        cfg.model = ModelDescriptor(cfg.model.name, {**cfg.model.parameters, "seed": args.seed})
    if args.format is not None:
        cfg.format = args.format
    return cfg


def cmd_run(config: RunConfig, command: str) -> dict:
    return report.run(config, command)


def cmd_demo(name: str, config: RunConfig | None = None) -> dict:
    config = config or RunConfig.from_dict(json.loads(json.dumps(DEMOS[name])))
    out = report.run(config, "phases" if "gammas" in config.outputs else "classify")
    out["command"] = "demo"
    out["demo"] = name
    return out


def cmd_table(n: int, expand: bool | None = None) -> dict:
    return report.table(n, expand)


def _emit(payload: dict, fmt: str, output: str | None) -> None:
    if fmt == "structured":
        text = json.dumps(payload, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
    else:
        text = report.render_text(payload)
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if fmt == "text" and "error" in payload and output:
        sys.stderr.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.format or "text"
    config = None
    try:
        if args.command == "table":
            payload = cmd_table(args.n, args.expand)
        else:
            config = config_from_args(args)
            fmt = config.format
            if args.command == "demo":
                payload = cmd_demo(args.name, config)
            else:
                payload = cmd_run(config, args.command)
        try:
            report.validate(payload)
        except Exception as exc:  # schema mismatch is our bug, not the user's
            raise InvariantViolation(f"report failed schema validation: {exc}") from exc
        code = EXIT_OK
    except (GeophaseError, ValueError) as exc:
        code = exit_code_for(exc)
        payload = report.error_report(args.command, exc, code, config)
    _emit(payload, fmt, args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
