"""Command line entry point ``ergodisk``.

Exit codes: 0 success, 1 a failed criterion in ``check``, 2 usage error,
3 numeric divergence (the report is still written).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import report
from .acceptance import run_all
from .classifier import besov_multiplier_check, classify, one_in_closure, range_cloud
from .dynamics import full_trace
from .functions import Constant, value_at_zero
from .norms import (
    Besov,
    BesovOne,
    Bloch,
    LittleBloch,
    besov1_seminorm,
    besov_norm,
    bloch_norm,
    condition_31,
    little_bloch_limsup,
    necessary_multiplier_sup,
    parse_space,
    sigma_psi,
    sup_norm_hinf,
)
from .parser import SpecSyntaxError, parse_spec, render
from .quadrature import GridSpec

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_DIVERGED = 0, 1, 2, 3
COMMANDS = ("norms", "classify", "trace", "spectrum", "check")


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", choices=["bloch", "little-bloch", "besov", "besov1"], default="bloch")
    common.add_argument("--p", type=float, help="Besov exponent, required with --space besov")
    common.add_argument("--fn", help="function text, e.g. 'poly 0 1' or 'mobius 0.5 rot 0+1i'")
    common.add_argument("--n", type=int, default=200, help="trace length or spectrum sample count")
    common.add_argument("--grid", help="JSON file with GridSpec fields")
    common.add_argument("--tol", type=float, default=1e-9, help="unit band for the classifier")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--svg", action="store_true", help="also write SVG plots")

    parser = argparse.ArgumentParser(prog="ergodisk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("norms", parents=[common], help="norms and seminorms of a function")
    sub.add_parser("classify", parents=[common], help="ergodic verdicts for M_psi")
    sub.add_parser("trace", parents=[common], help="iterate and Cesaro norm traces of M_psi applied to 1")
    sub.add_parser("spectrum", parents=[common], help="sample the closure of the range of psi")
    sub.add_parser("check", parents=[common], help="run the acceptance suite")
    return parser


def load_grid(args) -> GridSpec:
    spec = GridSpec()
    if args.grid:
        try:
            spec = GridSpec.from_json(Path(args.grid).read_text())
        except (OSError, ValueError, TypeError) as exc:
            raise UsageError(f"bad --grid file: {exc}") from None
    seed = os.environ.get("ERGODISK_SEED")
    if seed:
        try:
            spec = replace(spec, seed=int(seed, 0))
        except ValueError as exc:
            raise UsageError(f"bad ERGODISK_SEED: {exc}") from None
    return spec


def _space(args):
    if args.space == "besov" and args.p is None:
        raise UsageError("--space besov needs --p")
    if args.space != "besov" and args.p is not None:
        raise UsageError("--p only applies to --space besov")
    try:
        return parse_space(args.space, args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _function(args):
    if not args.fn:
        raise UsageError(f"{args.command} needs --fn")
    try:
        return parse_spec(args.fn)
    except SpecSyntaxError as exc:
        raise UsageError(f"cannot parse --fn: {exc}") from None


def _header(args, space, spec: GridSpec) -> dict:
    return {
        "command": args.command,
        "space": space.label,
        "grid": spec.to_dict(),
        "tolerances": {"unit_band": args.tol},
    }


def cmd_norms(args, spec: GridSpec, out: Path):
    space = _space(args)
    f = _function(args)
    est = {"sup_norm_hinf": sup_norm_hinf(f, spec)}
    if isinstance(space, (Bloch, LittleBloch)):
        norm, semi = bloch_norm(f, spec)
        est.update(bloch_norm=norm, bloch_seminorm=semi,
                   little_bloch_limsup=little_bloch_limsup(f, spec), sigma_psi=sigma_psi(f, spec))
    elif isinstance(space, Besov):
        norm, semi = besov_norm(f, space.p, spec)
        est.update(besov_norm=norm, besov_seminorm=semi, condition_31=condition_31(f, space.p, spec),
                   necessary_multiplier_sup=necessary_multiplier_sup(f, space.p, spec))
    else:
        est.update(besov1_seminorm=besov1_seminorm(f, spec))
    data = _header(args, space, spec)
    data["fn"] = render(f)
    data["value_at_zero"] = [value_at_zero(f).real, value_at_zero(f).imag]
    data["norms"] = {k: v.to_dict() for k, v in est.items()}
    report.write_json(data, out / "report.json")
    main_key = next(k for k in est if k.endswith("norm") and k != "sup_norm_hinf")
    summary = f"{main_key} = {est[main_key].value!r} (error {est[main_key].error_estimate:.3g})"
    diverged = any(v.diverged for v in est.values())
    return (EXIT_DIVERGED if diverged else EXIT_OK), summary


def cmd_classify(args, spec: GridSpec, out: Path):
    space = _space(args)
    if isinstance(space, BesovOne):
        raise UsageError("classification is available for bloch, little-bloch and besov")
    psi = _function(args)
    try:
        rep = classify(psi, space, spec, args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report.write_json(rep.to_dict(), out / "report.json")
    summary = " / ".join(f"{name}: {v.label}" for name, v in
                         zip(("power_bounded", "mean_ergodic", "uniformly_mean_ergodic"), rep.verdicts))
    diverged = rep.diverged or any(est.diverged for v in rep.verdicts for _, est in v.evidence)
    return (EXIT_DIVERGED if diverged else EXIT_OK), summary


def cmd_trace(args, spec: GridSpec, out: Path):
    space = _space(args)
    psi = _function(args)
    if args.n < 1:
        raise UsageError("--n must be positive")
    trace = full_trace(psi, Constant(1), space, args.n, spec)
    report.write_trace_csv(trace, out / "trace.csv")
    files = ["trace.csv"]
    if args.svg:
        report.write_text(out / "trace.svg", report.trace_svg(trace, f"psi = {trace.psi_id}"))
        files.append("trace.svg")
    last = trace.entries[-1]
    data = _header(args, space, spec)
    data.update(
        psi=trace.psi_id,
        f=trace.f_id,
        N=args.n,
        files=files,
        last={"n": last.n, "iterate_norm": last.iterate_norm.to_dict(), "cesaro_norm": last.cesaro_norm.to_dict()},
        unconverged_entries=sum(
            1 for e in trace.entries if not (e.iterate_norm.converged and e.cesaro_norm.converged)
        ),
    )
    report.write_json(data, out / "report.json")
    diverged = any(e.iterate_norm.diverged or e.cesaro_norm.diverged for e in trace.entries)
    summary = f"n = {last.n}: iterate {last.iterate_norm.value:.6g}, cesaro {last.cesaro_norm.value:.6g}"
    return (EXIT_DIVERGED if diverged else EXIT_OK), summary


def cmd_spectrum(args, spec: GridSpec, out: Path):
    space = _space(args)
    psi = _function(args)
    if args.n < 1:
        raise UsageError("--n must be positive")
    cloud = range_cloud(psi, args.n, spec)
    report.write_text(out / "spectrum.csv", report.spectrum_csv(cloud))
    files = ["spectrum.csv"]
    if args.svg:
        report.write_text(out / "spectrum.svg", report.spectrum_svg(cloud, f"psi = {render(psi)}"))
        files.append("spectrum.svg")
    closure = one_in_closure(psi, args.tol, spec)
    data = _header(args, space, spec)
    diverged = closure.distance.diverged
    if isinstance(space, Besov):
        mult = besov_multiplier_check(psi, space.p, spec)
        c31 = dict(mult.evidence)["condition_31"]
        meaning = "spectrum" if c31.converged and not c31.diverged else "subset of spectrum"
        data["multiplier"] = mult.to_dict()
        diverged |= c31.diverged and mult.status.value != "Fails"
    else:
        meaning = "subset of spectrum"
    data.update(
        psi=render(psi),
        samples=int(cloud.size),
        interpretation=meaning,
        max_modulus=float(abs(cloud).max()),
        min_distance_to_one=float(abs(1 - cloud).min()),
        one_in_closure=closure.result,
        inf_abs_1_minus_psi=closure.distance.to_dict(),
        files=files,
    )
    report.write_json(data, out / "report.json")
    summary = f"{cloud.size} samples ({meaning}); 1 in closure: {closure.result}"
    return (EXIT_DIVERGED if diverged else EXIT_OK), summary


def cmd_check(args, spec: GridSpec, out: Path, quiet: bool):
    results = run_all(spec, args.grid, echo=None if quiet else print)
    data = {
        "command": "check",
        "grid": spec.to_dict(),
        "tolerances": {"unit_band": args.tol},
        "criteria": [r.to_dict() for r in results],
        "passed": all(r.passed for r in results),
    }
    report.write_json(data, out / "report.json")
    n_pass = sum(r.passed for r in results)
    summary = f"{n_pass}/{len(results)} acceptance criteria passed"
    return (EXIT_OK if data["passed"] else EXIT_FAILED), summary


def run_cli(argv: list[str] | None = None, quiet: bool = False) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        spec = load_grid(args)
        out = Path(args.out)
        if args.command == "check":
            code, summary = cmd_check(args, spec, out, quiet)
        else:
            handler = {"norms": cmd_norms, "classify": cmd_classify,
                       "trace": cmd_trace, "spectrum": cmd_spectrum}[args.command]
            code, summary = handler(args, spec, out)
    except UsageError as exc:
        print(f"ergodisk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ergodisk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not quiet:
        print(f"{args.command}: {summary}")
    return code


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
