"""Command line entry point: ``p3p bench``, ``p3p time`` and ``p3p solve``."""

import argparse
import json
import os
import sys

import numpy as np

from .bench.io import (
    FormatError,
    load_instance,
    report_skeleton,
    solution_to_dict,
    write_histogram_csv,
    write_json,
)
from .bench.runner import BenchConfig, run_benchmark, run_timing
from .solver import solve_p3p

EXIT_OK = 0
EXIT_USAGE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1, got %d" % value)
    return value


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser():
    p = _Parser(prog="p3p", description="Conic-transformation P3P solver and benchmarks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bench", help="accuracy benchmark on synthetic trials")
    b.add_argument("--samples", type=_positive, default=100_000)
    b.add_argument("--seed", type=_seed, default=1)
    b.add_argument("--threads", type=_positive, default=1)
    b.add_argument("--failure-threshold", type=float, default=1e-6)
    b.add_argument("--out", required=True, help="report JSON path")
    b.add_argument("--csv", help="histogram CSV path (default: <out stem>.csv)")

    t = sub.add_parser("time", help="single-threaded timing benchmark")
    t.add_argument("--samples", type=_positive, default=100_000)
    t.add_argument("--seed", type=_seed, default=1)
    t.add_argument("--reps", type=_positive, default=100)
    t.add_argument("--out", required=True, help="report JSON path")

    s = sub.add_parser("solve", help="solve one instance from a JSON file")
    s.add_argument("--input", required=True)
    s.add_argument("--json", action="store_true", help="print the solution as JSON")
    return p


def _summary(rep):
    lines = []
    err = rep.get("errors")
    if err:
        fmt = lambda v: "n/a" if v is None else "%.3e" % v  # noqa: E731
        lines.append(
            "error  mean %s  median %s  max %s  (failures %d)"
            % (fmt(err["mean"]), fmt(err["median"]), fmt(err["max"]), err["failures"])
        )
    if rep.get("counters"):
        lines.append("  ".join("%s %d" % kv for kv in rep["counters"].items()))
    if rep.get("timing"):
        lines.append("  ".join("%s %.1f" % kv for kv in rep["timing"].items()))
    return "\n".join(lines)


def _cmd_bench(args):
    csv_path = args.csv or os.path.splitext(args.out)[0] + ".csv"
    cfg = BenchConfig(
        samples=args.samples,
        seed=args.seed,
        threads=args.threads,
        failure_threshold=args.failure_threshold,
        out=args.out,
        csv=csv_path,
    )
    rep = run_benchmark(cfg)
    write_json(args.out, rep)
    write_histogram_csv(csv_path, rep["histogram"])
    print(_summary(rep))
    return EXIT_OK


def _cmd_time(args):
    cfg = BenchConfig(samples=args.samples, seed=args.seed, timing_reps=args.reps, out=args.out)
    res = run_timing(cfg)
    rep = report_skeleton(timing=res["timing"], config=res["config"])
    write_json(args.out, rep)
    print(_summary(rep))
    return EXIT_OK


def _cmd_solve(args):
    inst = load_instance(args.input)
    out = solve_p3p(inst)
    if args.json:
        print(json.dumps(solution_to_dict(out), indent=2))
        return EXIT_OK
    print("%d solution(s) [%s]" % (len(out), out.diagnostic))
    with np.printoptions(precision=9, suppress=True):
        for k, sol in enumerate(out.solutions):
            print("#%d depths %s" % (k, np.array(sol.depths.astuple())))
            print("R =\n%s\nt = %s" % (sol.pose.R, sol.pose.t))
    return EXIT_OK


_COMMANDS = {"bench": _cmd_bench, "time": _cmd_time, "solve": _cmd_solve}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (OSError, FormatError, ValueError) as exc:
        print("p3p: error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
