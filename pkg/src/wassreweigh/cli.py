"""Command line entry point.

Exit status: 0 on success, 1 on a usage error, 2 on a data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from wassreweigh.analysis import analyze_units
from wassreweigh.covering import greedy_cover
from wassreweigh.datasets import DatasetError, read_dataset, write_dataset, write_weights
from wassreweigh.distribution import DistributionError
from wassreweigh.exact_oracle import SizeCapExceeded, exact_w1
from wassreweigh.generators import GenSpec, InfeasibleSpecError, gen_adversarial, gen_clustered
from wassreweigh.hypercube import DimensionMismatchError
from wassreweigh.ot_reduce import ReweighConfig, greedy_w1
from wassreweigh.pipeline import PipelineOptions, reweigh_pipeline
from wassreweigh.sampler import concentration_experiment, write_curve_csv

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with status 2
        raise UsageError(f"{self.prog}: {message}")


def _num(x: float) -> str:
    return f"{x:.9f}"


def _dump_json(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_reweigh(args: argparse.Namespace) -> int:
    S = read_dataset(args.source)
    T = read_dataset(args.target)
    config = ReweighConfig(
        alpha=args.alpha, m=args.sample_size, seed=args.seed, C=args.scale, tie_break=args.tie_break, variant=args.variant
    )
    out, report = reweigh_pipeline(
        S, T, config, PipelineOptions(
            target_seed=args.target_seed, diagnostics=not args.no_diagnostics, cover_zeta=args.cover_zeta
        )
    )
    write_weights(args.out, out)
    if args.report:
        _dump_json(report.as_dict(timings=args.timings), args.report)
    return 0


def cmd_w1(args: argparse.Namespace) -> int:
    P = read_dataset(args.a)
    Q = read_dataset(args.b)
    if P.d != Q.d:
        raise DimensionMismatchError(f"dimension mismatch: {args.a} has d={P.d}, {args.b} has d={Q.d}")
    if args.method == "exact":
        value = exact_w1(P, Q)
    else:
        value = greedy_w1(P, Q, args.scale)
    print(_num(value))
    return 0


def cmd_cover(args: argparse.Namespace) -> int:
    points = []
    d = None
    for path in args.input:
        dist = read_dataset(path)
        if d is not None and dist.d != d:
            raise DimensionMismatchError(f"dimension mismatch: {path} has d={dist.d}, expected {d}")
        d = dist.d
        points.extend(dist.points)
    _dump_json(greedy_cover(points, args.zeta).as_dict(), args.out)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    P = read_dataset(args.a)
    Q = read_dataset(args.b)
    if P.d != Q.d:
        raise DimensionMismatchError(f"dimension mismatch: {args.a} has d={P.d}, {args.b} has d={Q.d}")
    if len(P) != len(Q):
        raise DatasetError("analyze needs two datasets with the same number of records")
    result = analyze_units(list(P.points), list(Q.points), args.eta, args.zeta, args.K)
    _dump_json(result.as_dict(), args.out)
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    if args.kind == "clustered":
        spec = GenSpec(
            d=args.d, n=args.n, eta=args.eta, zeta=args.zeta, seed=args.seed, skew=args.skew, distinct=not args.merge
        )
        S, T = gen_clustered(spec)
    else:
        S, T = gen_adversarial(args.level, args.d)
    write_dataset(args.out_source, S)
    write_dataset(args.out_target, T)
    return 0


def cmd_sample_exp(args: argparse.Namespace) -> int:
    P = read_dataset(args.input)
    reports = concentration_experiment(
        P, args.m, args.trials, args.seed, estimator=args.estimator, epsilon_slack=args.epsilon_slack
    )
    _dump_json({"reports": [r.as_dict() for r in reports]}, args.out)
    if args.csv:
        write_curve_csv(args.csv, reports)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wassreweigh", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("reweigh", help="reweigh a source dataset toward a target")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--sample-size", type=int, required=True)
    p.add_argument("--scale", type=int, default=None, help="scale factor C (default: derived from weights)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target-seed", type=int, default=None, help="defaults to --seed")
    p.add_argument("--tie-break", choices=["lex"], default="lex")
    p.add_argument("--variant", choices=["global", "nearest"], default="global")
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    p.add_argument("--no-diagnostics", action="store_true")
    p.add_argument("--cover-zeta", type=int, default=4, help="radius for the covering diagnostic")
    p.set_defaults(func=cmd_reweigh)

    p = sub.add_parser("w1", help="1-Wasserstein distance between two datasets")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--method", choices=["greedy", "exact"], default="greedy")
    p.add_argument("--scale", type=int, default=None)
    p.set_defaults(func=cmd_w1)

    p = sub.add_parser("cover", help="greedy covering report")
    p.add_argument("--input", action="append", required=True, help="dataset file; repeat to take a union")
    p.add_argument("--zeta", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("analyze", help="greedy vs exact matching with cycle diagnostics")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--eta", type=int, default=None)
    p.add_argument("--zeta", type=int, default=None)
    p.add_argument("--K", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("gen", help="write a synthetic source/target pair")
    p.add_argument("--kind", choices=["clustered", "adversarial"], required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--eta", type=int, default=4)
    p.add_argument("--zeta", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--skew", type=float, default=0.5)
    p.add_argument("--merge", action="store_true", help="allow repeated draws, merged into weights")
    p.add_argument("--level", type=int, default=3)
    p.add_argument("--out-source", required=True)
    p.add_argument("--out-target", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sample-exp", help="sampling concentration experiment")
    p.add_argument("--input", required=True)
    p.add_argument("--m", type=_int_list, default=[250, 1000, 4000])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--estimator", choices=["exact", "greedy"], default="exact")
    p.add_argument("--epsilon-slack", type=float, default=0.1)
    p.add_argument("--out", default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_sample_exp)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "gen" and args.kind == "clustered" and args.d is None:
            args.d = 64
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DimensionMismatchError as exc:
        print(f"dimension error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DatasetError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DistributionError, InfeasibleSpecError, SizeCapExceeded) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
