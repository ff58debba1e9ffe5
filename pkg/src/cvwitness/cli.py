"""``cvwitness`` command line: build states, evaluate criteria, classify, sweep, simulate.

Exit codes: 0 success, 2 usage error, 3 mode-count mismatch, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from . import criteria as cr
from .errors import DimensionError, DomainError, NumericError
from .gaussian import CovarianceMatrix
from .homodyne import EnsembleConfig, run_verification
from .ppt import classify_tripartite
from .states import (
    GhzFamilyParams,
    ghz_family_analytic,
    ghz_family_network,
    squeezed_vacuum,
    two_mode_squeezed,
    unbiased_r1,
)

EXIT_USAGE = 2
EXIT_DIMENSION = 3
EXIT_NUMERIC = 4
SEED_ENV = "CV_WITNESS_SEED"


class UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _gain(text: str) -> str | float:
    if text in ("optimal", "zero"):
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"gain must be 'optimal', 'zero' or a number, got {text!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"


def _load_state(path: str) -> CovarianceMatrix:
    try:
        return CovarianceMatrix.load(path)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise UsageError(f"cannot read state file {path}: {exc}") from None


def cmd_state(args: argparse.Namespace) -> int:
    try:
        v = _build_state(args)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    _emit(v.to_json() + "\n", args.output)
    return 0


def _build_state(args: argparse.Namespace) -> CovarianceMatrix:
    family = args.family
    if family == "vacuum":
        v = CovarianceMatrix.vacuum(args.n_modes)
    elif family == "squeezed":
        if args.n_modes != 1:
            raise UsageError("squeezed vacuum is a single-mode state; use -N 1")
        v = squeezed_vacuum(args.r, args.axis)
    elif family == "tms":
        if args.n_modes != 2:
            raise UsageError("two-mode squeezed state needs -N 2")
        v = two_mode_squeezed(args.r)
    else:
        r1 = unbiased_r1(args.n_modes, args.r2) if args.unbiased else args.r1
        params = GhzFamilyParams(args.n_modes, r1, args.r2)
        build = ghz_family_network if args.via == "network" else ghz_family_analytic
        v = build(params)
    return v


def _conditions(args: argparse.Namespace, v: CovarianceMatrix) -> list[cr.QuadCombination]:
    if args.h is not None or args.g is not None:
        if args.h is None or args.g is None:
            raise UsageError("--h and --g must be given together")
        if len(args.h) != v.n_modes or len(args.g) != v.n_modes:
            raise DimensionError(
                f"combination has {len(args.h)}/{len(args.g)} coefficients, state has {v.n_modes} modes"
            )
        return [cr.QuadCombination(tuple(args.h), tuple(args.g))]
    if v.n_modes == 2:
        return [cr.pair_condition(2, 1, 2)]
    if v.n_modes < 2:
        raise DimensionError("criteria need at least two modes")
    if args.gains == "optimal":
        return cr.fitted_condition_set(v)
    gain = 0.0 if args.gains == "zero" else args.gains
    return cr.ghz_condition_set(v.n_modes, gain)


def _criteria_table(report: cr.CertificationReport, thresholds: list[float]) -> str:
    lines = ["condition  total_variance  genuine_threshold  h / g"]
    for i, (c, t, th) in enumerate(zip(report.conditions, report.total_variances, thresholds)):
        lines.append(
            f"{i:>9}  {t:>14.10f}  {th:>17.10f}  "
            f"h=({', '.join(f'{x:g}' for x in c.h)}) g=({', '.join(f'{x:g}' for x in c.g)})"
        )
    lines.append("")
    lines.append("bipartition  bounds  excluded_by")
    width = max(len(str(o.partition)) for o in report.outcomes)
    for o in report.outcomes:
        bounds = " ".join(f"{b:.6g}" for b in o.bounds)
        by = ",".join(str(i) for i in o.excluded_by) or "-"
        lines.append(f"{str(o.partition):<{width}}  [{bounds}]  {by}")
    lines.append("")
    lines.append(f"genuine: {'true' if report.genuine else 'false'}")
    return "\n".join(lines) + "\n"


def cmd_criteria(args: argparse.Namespace) -> int:
    v = _load_state(args.state)
    conditions = _conditions(args, v)
    report = cr.certify_genuine(v, conditions)
    thresholds = [cr.genuine_threshold(c) for c in conditions]
    data = report.to_dict()
    for entry, th in zip(data["conditions"], thresholds):
        entry["genuine_threshold"] = th
    if args.output:
        Path(args.output).write_text(_dump(data))
    sys.stdout.write(_dump(data) if args.json else _criteria_table(report, thresholds))
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    v = _load_state(args.state)
    result = classify_tripartite(v, args.tol)
    data = result.to_dict()
    if args.output:
        Path(args.output).write_text(_dump(data))
    if args.json:
        sys.stdout.write(_dump(data))
    else:
        lines = [f"class: {result.label}"]
        for j, (flag, eig) in enumerate(zip(result.npt_flags, result.min_pt_eigenvalues), 1):
            lines.append(f"mode {j}: {'npt' if flag else 'ppt'}  min_pt_eig={eig:.10g}")
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def sweep_rows(
    n_modes: int, family: str, r_min: float, r_max: float, steps: int, gain: str | float
) -> list[dict]:
    """Canonical-condition total variance along one GHZ-type family, ``steps`` points in r."""
    if family not in ("one_squeezer", "equal_squeezers", "unbiased"):
        raise UsageError(f"unknown family {family!r}")
    if steps < 1 or r_min > r_max:
        raise UsageError("need steps >= 1 and r_min <= r_max")
    rows = []
    for r in np.linspace(r_min, r_max, steps):
        r = float(r)
        if family == "one_squeezer":
            r1, r2 = r, 0.0
        elif family == "equal_squeezers":
            r1, r2 = r, r
        else:
            r1, r2 = unbiased_r1(n_modes, r), r
        if gain == "optimal":
            g = cr.optimal_gain(n_modes, r1, r2)
        elif gain == "zero":
            g = 0.0
        else:
            g = float(gain)
        rows.append(
            {
                "r": r,
                "r1": r1,
                "r2": r2,
                "gain": g,
                "total_variance": cr.ghz_condition_variance(n_modes, r1, r2, g),
                "genuine_threshold": cr.CANONICAL_BOUND,
            }
        )
    return rows


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.n_modes < 3:
        raise UsageError("sweep needs -N >= 3")
    rows = sweep_rows(args.n_modes, args.family, args.r_min, args.r_max, args.steps, args.gain)
    fields = ["r", "r1", "r2", "gain", "total_variance", "genuine_threshold"]
    handle = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([f"{row[k]:.17g}" for k in fields])
    finally:
        if args.output:
            handle.close()
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    v = _load_state(args.state)
    conditions = _conditions(args, v)
    cfg = EnsembleConfig(args.n, args.seed, args.noise, workers=args.workers)
    report = run_verification(v, conditions, cfg)
    data = report.to_dict()
    if args.output:
        Path(args.output).write_text(_dump(data))
    if args.json:
        sys.stdout.write(_dump(data))
    else:
        lines = [f"seed={cfg.seed} n_samples={cfg.n_samples} rng={data['rng']}"]
        for i, est in enumerate(report.estimates):
            lines.append(f"condition {i}: estimate={est.estimate:.6f} +- {est.std_error:.6f}")
        lines.append(f"surviving: {', '.join(data['surviving']) or '-'}")
        lines.append(f"genuine: {'true' if report.genuine else 'false'}")
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _add_condition_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gains", type=_gain, default="optimal",
                   help="gain on the other modes' momenta: optimal (fitted to the state), zero, or a number")
    p.add_argument("--h", type=_float_list, help="x coefficients of a single custom combination")
    p.add_argument("--g", type=_float_list, help="p coefficients of a single custom combination")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvwitness", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", help="write a covariance matrix as JSON")
    p.add_argument("--family", choices=["vacuum", "squeezed", "tms", "ghz"], required=True)
    p.add_argument("-N", "--n-modes", type=int, default=1)
    p.add_argument("--r", type=float, default=0.0, help="squeezing for squeezed/tms")
    p.add_argument("--axis", choices=["x", "p"], default="x")
    p.add_argument("--r1", type=float, default=0.0)
    p.add_argument("--r2", type=float, default=0.0)
    p.add_argument("--unbiased", action="store_true", help="derive r1 from r2 for the unbiased member")
    p.add_argument("--via", choices=["analytic", "network"], default="analytic")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("criteria", help="evaluate total-variance conditions on a state")
    p.add_argument("state")
    _add_condition_flags(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_criteria)

    p = sub.add_parser("classify", help="npt classification of a three-mode state")
    p.add_argument("state")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", help="canonical-condition variance versus squeezing, as CSV")
    p.add_argument("-N", "--n-modes", type=int, required=True)
    p.add_argument("--family", choices=["one_squeezer", "equal_squeezers", "unbiased"], required=True)
    p.add_argument("--r-min", type=float, default=0.0)
    p.add_argument("--r-max", type=float, default=3.0)
    p.add_argument("--steps", type=int, default=31, help="number of r values, endpoints included")
    p.add_argument("--gain", type=_gain, default="optimal")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo homodyne verification")
    p.add_argument("state")
    _add_condition_flags(p)
    p.add_argument("-n", type=int, default=100_000, help="ensemble size")
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${SEED_ENV} or 0)")
    p.add_argument("--noise", type=float, default=0.0, help="detector noise variance per quadrature")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cvwitness: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DimensionError as exc:
        print(f"cvwitness: dimension error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except (NumericError, DomainError) as exc:
        print(f"cvwitness: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
