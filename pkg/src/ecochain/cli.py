"""Command-line front end.

Exit status: 0 on success, 1 on configuration/parameter errors, 2 on
numerical failure (step underflow, degenerate solve, failed reproduction).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import equilibria as eqm
from . import figures
from .io import ConfigError, RunConfig, apply_overrides, emit_csv, fmt, parse_config, trajectory_svg
from .model import FIGURE_PARAMS, ParameterError, check_params
from .simulate import IntegratorConfig, integrate
from .stability import InternalError, bifurcation_sweep, classify

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2


class NumericalFailure(RuntimeError):
    pass


def preset_config(name: str) -> RunConfig:
    if name not in FIGURE_PARAMS:
        raise ConfigError(f"unknown preset {name!r} (expected fig1..fig4)", "preset")
    return RunConfig(figures.VARIANT[name], FIGURE_PARAMS[name], figures.default_x0(name),
                     IntegratorConfig(tmax=figures.TMAX[name]))


def _load(args) -> RunConfig:
    if args.config and args.preset:
        raise ConfigError("use either --config or --preset")
    if args.config == "-":
        cfg = parse_config(sys.stdin.read())
    elif args.config:
        cfg = parse_config(Path(args.config).read_text(encoding="utf-8"))
    elif args.preset:
        cfg = preset_config(args.preset)
    else:
        raise ConfigError("no configuration: pass --config PATH, --config - (stdin) or --preset")
    overrides = {}
    if args.variant:
        overrides["variant"] = args.variant
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    check_params(cfg.params, cfg.variant)
    return cfg


def _write(text: str, path: str | None) -> None:
    if path and path != "-":
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _vec(x) -> str:
    return "(" + ", ".join(fmt(v) for v in x) + ")"


def _cplx(z: complex) -> str:
    if z.imag == 0:
        return fmt(z.real)
    return f"{fmt(z.real)}{'+' if z.imag >= 0 else '-'}{fmt(abs(z.imag))}i"


def cmd_simulate(args) -> int:
    cfg = _load(args)
    traj = integrate(cfg.variant, cfg.params, cfg.x0, cfg.integrator)
    _write(emit_csv(traj), args.out or cfg.out)
    svg = args.svg or cfg.svg
    if svg:
        Path(svg).write_text(trajectory_svg(traj, f"{cfg.variant.value} model"), encoding="utf-8")
    if traj.terminated:
        raise NumericalFailure(traj.terminated)
    return EXIT_OK


def cmd_equilibria(args) -> int:
    cfg = _load(args)
    lines = ["label,P,S,I,V,feasible,residual,provenance,status"]
    for e in eqm.find_equilibria(cfg.variant, cfg.params):
        cells = [e.label, *(fmt(v) for v in e.state), "1" if e.feasible else "0",
                 fmt(e.residual), e.provenance, e.status]
        lines.append(",".join(cells))
    if cfg.variant.logistic:
        t = eqm.thresholds(cfg.params)
        lines.append(f"# rho1={fmt(t.rho1)} rho2={fmt(t.rho2)}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_stability(args) -> int:
    cfg = _load(args)
    out = []
    for e in eqm.find_equilibria(cfg.variant, cfg.params):
        if e.status != "ok":
            out.append(f"{e.label}: {e.status} ({e.note})")
            continue
        c = classify(cfg.variant, cfg.params, e)
        out.append(f"{e.label} {_vec(e.state)} feasible={int(e.feasible)}")
        out.append("  eigenvalues: " + ", ".join(_cplx(z) for z in c.eigenvalues))
        out.append("  char_poly: " + ", ".join(fmt(a) for a in c.char_poly.coeffs))
        rh = c.rh.status + (f" at {c.rh.condition}" if c.rh.condition else "")
        out.append(f"  routh_hurwitz: {rh}")
        out.append(f"  class: {c.kind.value} (unstable={c.n_unstable}, neutral={c.n_neutral})")
    _write("\n".join(out) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    name = args.param or cfg.param
    lo = args.lo if args.lo is not None else cfg.lo
    hi = args.hi if args.hi is not None else cfg.hi
    n = args.n if args.n is not None else cfg.n
    if name is None or lo is None or hi is None or n is None:
        raise ConfigError("sweep needs --param, --lo, --hi and --n")
    try:
        table = bifurcation_sweep(cfg.params, name, lo, hi, n, cfg.variant)
    except ValueError as e:
        if isinstance(e, ParameterError):
            raise
        raise ConfigError(str(e), "param") from None
    _write(emit_csv(table), args.out or cfg.out)
    for c in table.crossings:
        pair = f" {c.colliding[0]}/{c.colliding[1]} gap={c.gap:.3g}" if c.colliding else ""
        print(f"crossing {c.threshold}=1 at {name}={fmt(c.value)}{pair}", file=sys.stderr)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    report = figures.run_figure(args.figure)
    print(f"reproduce {args.figure}")
    for c in report.checks:
        print(c.line())
    for note in report.notes:
        print(note)
    if args.out_dir:
        d = Path(args.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{args.figure}.csv").write_text(emit_csv(report.trajectory), encoding="utf-8")
        (d / f"{args.figure}.svg").write_text(
            trajectory_svg(report.trajectory, f"{args.figure} reproduction"), encoding="utf-8")
    print("PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecochain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="flat JSON config file, or - for stdin")
        sp.add_argument("--preset", choices=sorted(FIGURE_PARAMS), help="figure parameter set")
        sp.add_argument("--variant", help="override the model variant")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
        sp.add_argument("--out", help="output path (default stdout)")

    sp = sub.add_parser("simulate", help="integrate a trajectory and write CSV")
    common(sp)
    sp.add_argument("--svg", help="also write an SVG time-series plot")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("equilibria", help="print the equilibrium table")
    common(sp)
    sp.set_defaults(func=cmd_equilibria)

    sp = sub.add_parser("stability", help="eigenvalues, char. polynomials and classifications")
    common(sp)
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("sweep", help="one-parameter branch table with threshold crossings")
    common(sp)
    sp.add_argument("--param")
    sp.add_argument("--lo", type=float)
    sp.add_argument("--hi", type=float)
    sp.add_argument("--n", type=int)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("reproduce", help="reproduce a figure and verify it")
    sp.add_argument("figure", choices=sorted(FIGURE_PARAMS))
    sp.add_argument("--out-dir", help="write <figure>.csv and <figure>.svg here")
    sp.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParameterError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalFailure, InternalError, FloatingPointError, np.linalg.LinAlgError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
