"""Command-line front end: ``fairsub generate|solve|verify|bench``.

Exit codes: 0 success, 1 bad input, 2 infeasible spec, 3 feasibility audit
failure (an internal bug sentinel); ``verify`` exits 1 when any check fails.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from .bench import run_bench
from .fair import FairSolveConfig, solve
from .files import generate_instance, read_instance, report_to_dict, write_instance
from .inner import SOLVERS
from .model import FairnessSpec, InfeasibleSpecError, parse_fraction
from .suite import random_suite, verify_instance

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_AUDIT = 3


def _default_seed() -> int:
    return int(os.environ.get("FAIRSUB_SEED", "0"))


def _fraction_arg(text):
    try:
        return parse_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r}") from None


def cmd_generate(args) -> int:
    try:
        inst = generate_instance(args.kind, args.n, args.m, args.p, args.seed,
                                 weight_range=(args.wmin, args.wmax))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    write_instance(inst, args.out)
    print(f"wrote {args.kind} instance n={args.n} m={args.m} to {args.out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    try:
        inst = read_instance(args.instance)
        spec = FairnessSpec(args.alpha, args.beta, args.cap)
        config = FairSolveConfig(solver=args.solver, seed=args.seed, trials=args.trials,
                                 epsilon=args.epsilon, best_of=args.best_of, lazy_fill=args.lazy_fill)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        report = solve(inst, spec, config)
    except InfeasibleSpecError as exc:
        print(f"infeasible: {exc.reason}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    doc = report_to_dict(report, inst, config)
    text = json.dumps(doc, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["trial", "value", "members"])
            for t, s in enumerate(report.solutions):
                w.writerow([t, repr(s.value), " ".join(map(str, sorted(s.members)))])
    print(
        f"algorithm {report.algorithm} ({report.branch}), solver {report.solver}: "
        f"mean {report.mean:.6g} +/- {report.stderr:.3g} over {len(report.solutions)} trials, "
        f"feasible={report.feasible}",
        file=sys.stderr,
    )
    for note in report.notes:
        print(f"note: {note}", file=sys.stderr)
    return EXIT_OK if report.feasible else EXIT_AUDIT


def cmd_verify(args) -> int:
    try:
        if args.suite == "random":
            results = random_suite(args.count, args.nmax, args.seed, trials=args.trials)
        elif args.instance:
            inst = read_instance(args.instance, validate=False)
            specs = None
            if args.alpha is not None:
                specs = [FairnessSpec(args.alpha, args.beta, args.cap)]
            results = verify_instance(inst, specs, trials=args.trials, seed=args.seed, budget=args.nmax)
        else:
            print("error: give an instance path or --suite random", file=sys.stderr)
            return EXIT_INPUT
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else 1


def cmd_bench(args) -> int:
    try:
        text = run_bench(args.config, jobs=args.jobs, timing=not args.no_timing)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fairsub", description="Group-fair non-monotone submodular maximization")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random instance file")
    g.add_argument("--kind", choices=["cut", "table"], default="cut")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--p", type=float, default=0.5, help="edge probability (cut instances)")
    g.add_argument("--wmin", type=float, default=1.0)
    g.add_argument("--wmax", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=_default_seed())
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="run the fairness algorithm routed by alpha and cap")
    s.add_argument("instance")
    s.add_argument("--alpha", type=_fraction_arg, required=True)
    s.add_argument("--beta", type=_fraction_arg, required=True)
    s.add_argument("--cap", type=int)
    s.add_argument("--solver", choices=sorted(SOLVERS), default="exact")
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--seed", type=int, default=_default_seed())
    s.add_argument("--epsilon", type=float, default=1e-4)
    s.add_argument("--best-of", action="store_true", help="select the best trial instead of the first")
    s.add_argument("--lazy-fill", action="store_true", help="capped high-alpha case: lazy refill variant")
    s.add_argument("--out", help="write the JSON report here instead of stdout")
    s.add_argument("--csv", help="also write per-trial values as CSV")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="run exact and statistical checks")
    v.add_argument("instance", nargs="?")
    v.add_argument("--suite", choices=["random"])
    v.add_argument("--count", type=int, default=20)
    v.add_argument("--nmax", type=int, default=12)
    v.add_argument("--alpha", type=_fraction_arg)
    v.add_argument("--beta", type=_fraction_arg, default=parse_fraction(1))
    v.add_argument("--cap", type=int)
    v.add_argument("--trials", type=int, default=1000)
    v.add_argument("--seed", type=int, default=_default_seed())
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run a parameter grid and emit CSV")
    b.add_argument("config")
    b.add_argument("--out")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--no-timing", action="store_true", help="leave the time column blank (byte-stable output)")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
