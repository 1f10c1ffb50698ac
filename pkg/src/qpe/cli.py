"""``qpe`` command line.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 I/O error,
4 numerical instability.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import checks
from .entropy import TranslationKind
from .errors import IngestionError, NumericalInstabilityError, QPEError
from .experiments import (
    EXCLUDE_BALL_DEFAULT,
    REGISTRY,
    CsvSource,
    ExperimentSpec,
    build_experiment,
    run_correlation,
    run_difference,
    run_entropy_sweep,
    run_gram,
)
from .feature_maps import CLI_NAMES, EncoderSpec
from .manifolds import CircleAngles, IntervalGrid, SphereAngles, SquareGrid
from .stats import DEFAULT_SEED

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3, 4

MANIFOLDS = ("interval", "square", "circle", "sphere")


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--encoder", action="append", metavar="NAME", help=f"encoder (repeatable): {', '.join(CLI_NAMES)}")
    p.add_argument("--manifold", choices=MANIFOLDS, help="sample grid instead of --data")
    p.add_argument("--range", nargs=2, type=float, metavar=("A", "B"), help="interval/square bounds (default 0 pi)")
    p.add_argument("--data", type=Path, metavar="CSV", help="CSV point cloud")
    p.add_argument("--columns", help="comma-separated feature columns for --data")
    p.add_argument("--target", help="label column to drop from features")
    p.add_argument("--preprocess", default="none", metavar="PRESET|STEPS", help="preset name or ';'-separated steps")
    p.add_argument("--translation", choices=[t.value for t in TranslationKind], action="append")
    p.add_argument("--grid", type=int, metavar="N", help="points (per axis for square/sphere)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", type=Path, default=Path("out"), metavar="DIR")
    p.add_argument("--su-normalize", action="store_true", help="divide each unitary by det^(1/dim)")
    p.add_argument("--exclude-ball", type=float, metavar="R", help="radius of excluded ball at the origin (square)")
    p.add_argument("--entropy", choices=("simplex", "circle"), default="simplex")
    p.add_argument("--entropy-view", choices=("point", "embed"), default="point")
    p.add_argument("--encoder-view", choices=("point", "embed"), default="point")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for per-point work")
    p.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script per CSV")
    p.add_argument("--name", help="output file stem (default: the subcommand)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpe", description="Shannon entropy vs. pseudo-entropy of quantum feature maps")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("sweep", "per-point entropies to CSV"),
        ("correlate", "Spearman/Xicor/Pearson report to JSON"),
        ("diff", "Shannon minus translated pseudo-entropy to CSV"),
        ("gram", "fidelity-kernel Gram matrix to CSV"),
    ):
        _common(sub.add_parser(name, help=help_))
    chk = sub.add_parser("check", help="run analytic self-checks")
    chk.add_argument("suite", nargs="*", default=["all"], help=f"suites: {', '.join(checks.SUITES)} or all")
    chk.add_argument("--out", type=Path, help="also write the JSON report here")
    exp = sub.add_parser("experiment", help="run a registered experiment")
    exp.add_argument("experiment", choices=sorted(REGISTRY), metavar="name", help=", ".join(sorted(REGISTRY)))
    _common(exp)
    return parser


def _sampler(args):
    a, b = args.range if args.range else (0.0, math.pi)
    n = args.grid
    if args.manifold == "interval":
        return IntervalGrid(a, b, n or 1000)
    if args.manifold == "square":
        r = EXCLUDE_BALL_DEFAULT if args.exclude_ball is None else args.exclude_ball
        return SquareGrid(a, b, n or 100, exclude_radius=r)
    if args.manifold == "circle":
        return CircleAngles(n or 1000)
    return SphereAngles(n or 100, n or 100)


def _encoders(args) -> tuple[EncoderSpec, ...]:
    if not args.encoder:
        raise UsageError("at least one --encoder is required")
    opts = {"su_normalize": True} if args.su_normalize else {}
    try:
        return tuple(EncoderSpec.from_name(e, **opts) for e in args.encoder)
    except ValueError as exc:
        raise UsageError(f"unknown encoder: {exc}") from None


def _translations(args):
    if args.translation:
        return tuple(TranslationKind(t) for t in args.translation)
    return (TranslationKind.REAL, TranslationKind.MODULUS)


def _columns(args):
    return tuple(c.strip() for c in args.columns.split(",")) if args.columns else None


def spec_from_args(args) -> ExperimentSpec:
    if (args.manifold is None) == (args.data is None):
        raise UsageError("give exactly one of --manifold or --data")
    common = dict(
        name=args.name or args.command,
        encoders=_encoders(args),
        translations=_translations(args),
        seed=args.seed,
        out_dir=args.out,
        entropy=args.entropy,
        entropy_view=args.entropy_view,
        encoder_view=args.encoder_view,
        jobs=args.jobs,
        gnuplot=args.gnuplot,
    )
    if args.data is not None:
        return ExperimentSpec(data=CsvSource(args.data, _columns(args), args.target, args.preprocess), **common)
    return ExperimentSpec(sampler=_sampler(args), **common)


def _print_reports(reports) -> None:
    for r in reports:
        print(json.dumps(r.to_json()))


def _cmd_experiment(args) -> int:
    name = args.experiment
    reg = REGISTRY[name]
    overrides = dict(
        grid=args.grid,
        seed=args.seed,
        out_dir=args.out,
        su_normalize=args.su_normalize,
        exclude_ball=args.exclude_ball,
        jobs=args.jobs,
        gnuplot=args.gnuplot,
    )
    if args.translation:
        overrides["translations"] = _translations(args)
    if reg.needs_data:
        if args.data is None:
            raise UsageError(f"experiment {name} needs --data <csv>")
        overrides.update(data=args.data, columns=_columns(args), target=args.target,
                         preset=None if args.preprocess == "none" else args.preprocess)
    spec = build_experiment(name, **overrides)
    records = None
    if "sweep" in reg.operations:
        records = run_entropy_sweep(spec)
        print(f"{name}: {len(records)} sweep records written to {args.out}")
    if "correlate" in reg.operations:
        _print_reports(run_correlation(spec, records))
    if "diff" in reg.operations:
        rows = run_difference(spec)
        print(f"{name}: {len(rows)} difference rows written to {args.out}")
    return EXIT_OK


def _cmd_check(args) -> int:
    suites = args.suite
    if suites == ["all"]:
        suites = list(checks.SUITES)
    bad = [s for s in suites if s not in checks.SUITES]
    if bad:
        raise UsageError(f"unknown check suite(s) {bad}; choose from {', '.join(checks.SUITES)} or all")
    report = checks.run_checks(suites)
    text = json.dumps(report, indent=2)
    print(text)
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text + "\n", encoding="utf-8")
    return EXIT_OK if report["passed"] else EXIT_CHECK


def dispatch(args) -> int:
    if args.command == "check":
        return _cmd_check(args)
    if args.command == "experiment":
        return _cmd_experiment(args)
    spec = spec_from_args(args)
    if args.command == "sweep":
        records = run_entropy_sweep(spec)
        print(f"{len(records)} records written to {args.out}")
    elif args.command == "correlate":
        _print_reports(run_correlation(spec))
    elif args.command == "diff":
        rows = run_difference(spec)
        print(f"{len(rows)} difference rows written to {args.out}")
    elif args.command == "gram":
        grams = run_gram(spec)
        for name, g in grams.items():
            print(f"{name}: {g.shape[0]}x{g.shape[1]} Gram matrix written to {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return dispatch(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qpe: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IngestionError, OSError) as exc:
        print(f"qpe: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalInstabilityError as exc:
        print(f"qpe: numerical instability: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (QPEError, ValueError) as exc:
        print(f"qpe: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
