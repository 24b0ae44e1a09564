"""Command line front end.

Subcommands: ``certify`` (symmetry verdicts), ``spectrum`` (one parameter
point), ``sweep`` (grid) and ``ep`` (bisection only). Exit status is 0 on
success, 2 for configuration errors and 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import __version__
from .fock import FockSpace
from .hamiltonians import assemble, quadratic_parameters
from .spectral import EigensolverError, analytic_spectrum, eigenspectrum, locate_ep
from .symmetry import find_rt_angle, is_symmetric, pt_spec, rt_spec
from .sweep import (
    PRESETS,
    ConfigError,
    NumericalFailure,
    SweepConfig,
    emit,
    preset_config,
    render,
    run_sweep,
    with_overrides,
)

log = logging.getLogger("rtsym")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _parse_value(text: str):
    for conv in (int, float, complex):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def _parse_params(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"param.{item}", "expected key=value")
        out[key.strip()] = _parse_value(value.strip())
    return out


def _load_config(args, reserved=()) -> tuple[SweepConfig, dict]:
    params = _parse_params(args.param)
    extra = {k: params.pop(k) for k in reserved if k in params}
    if args.config and args.preset:
        raise ConfigError("<args>", "use either --config or --preset, not both")
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError("--config", str(exc)) from None
        except json.JSONDecodeError as exc:
            raise ConfigError("--config", f"invalid JSON: {exc}") from None
        config = SweepConfig.from_dict(data)
        if args.cutoff is not None:
            params.setdefault("cutoff", args.cutoff)
        if args.eps is not None:
            params.setdefault("eps", args.eps)
    else:
        preset = args.preset or "fig2"
        g = float(params.pop("g", 1.0))
        eps = args.eps if args.eps is not None else 0.1
        config = preset_config(preset, eps=eps, g=g, cutoff=args.cutoff or 12)
    config = with_overrides(config, params) if params else config
    return config, {**params, **extra}


def _out(text: str, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_sweep(args) -> int:
    config, _ = _load_config(args)
    fmt = args.format or config.format
    path = args.out or config.path
    result = run_sweep(config)
    if path:
        emit(result, fmt, path)
        log.info("wrote %d rows to %s", len(result.rows), path)
    else:
        sys.stdout.write(render(result, fmt))
    return EXIT_OK


def _point_value(config, params):
    return params.get(config.parameter, config.lo)


def cmd_spectrum(args) -> int:
    config, params = _load_config(args)
    value = _point_value(config, params)
    spec = config.hamiltonian.with_parameter(config.parameter, value)
    space = FockSpace(2, config.cutoff)
    h = assemble(space, spec)
    report = eigenspectrum(h, config.tol_classification)
    out = {
        "parameter": config.parameter,
        "value": value,
        "cutoff": config.cutoff,
        "hamiltonian": spec.to_dict(),
        "eigenvalues": [[z.real, z.imag] for z in report.eigenvalues.tolist()],
        "class": report.classification.kind.value,
        "min_angle": report.coalescence.min_angle,
        "cond": report.coalescence.condition if np.isfinite(report.coalescence.condition) else "SINGULAR",
    }
    quad = quadratic_parameters(spec)
    if quad is not None:
        g, eps, kappa = quad
        an = analytic_spectrum(g, kappa, eps)
        out["analytic"] = {
            "singular": an.singular,
            "levels": {str(n): None if z is None else [z.real, z.imag] for n, z in an.levels.items()},
        }
    _out(json.dumps(out, indent=1, allow_nan=False) + "\n", args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    config, params = _load_config(args)
    value = _point_value(config, params)
    spec = config.hamiltonian.with_parameter(config.parameter, value)
    space = FockSpace(2, config.cutoff)
    h = assemble(space, spec)
    records = [is_symmetric(h, pt_spec(space), config.tol_symmetry).record()]
    theta = config.rt_theta if config.rt_theta is not None else find_rt_angle(h, config.tol_symmetry)
    if theta is not None:
        records.append(is_symmetric(h, rt_spec(space, theta), config.tol_symmetry).record())
    else:
        records.append({"symmetry": "RT", "theta": None, "residual": None, "verdict": False})
    _out(json.dumps(records, indent=1, allow_nan=False) + "\n", args.out)
    return EXIT_OK


def cmd_ep(args) -> int:
    config, params = _load_config(args, reserved=("tol",))
    quad = quadratic_parameters(config.hamiltonian)
    if quad is None:
        raise ConfigError("hamiltonian", "ep needs a coupled gain/loss pair with real positive g")
    g, eps, _ = quad
    tol = float(params.get("tol", config.tol_ep))
    loc = locate_ep(g, eps, float(config.lo), float(config.hi), tol, config.tol_classification)
    rec = {"kappa": loc.kappa, "g": g, "eps": eps, "lo": loc.lo, "hi": loc.hi,
           "tol": tol, "block_exact": loc.block_exact, "caveat": loc.caveat}
    _out(json.dumps(rec, indent=1) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON sweep configuration")
    common.add_argument("--preset", choices=PRESETS, help="built-in configuration")
    common.add_argument("--eps", type=float, help="drive strength for presets")
    common.add_argument("--cutoff", type=int, help="maximum occupation per mode")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--param", action="append", metavar="KEY=VALUE",
                        help="override a Hamiltonian or sweep parameter (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="rtsym", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, text in (
        ("certify", cmd_certify, "PT / RT verdicts for one Hamiltonian"),
        ("spectrum", cmd_spectrum, "eigenvalues at a single parameter point"),
        ("sweep", cmd_sweep, "spectra and verdicts over a parameter grid"),
        ("ep", cmd_ep, "locate the exceptional point by bisection"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, EigensolverError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
