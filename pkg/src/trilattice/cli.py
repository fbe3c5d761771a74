"""Command-line entry point: ``trilattice {gen,solve,bench,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import sys

from . import bench
from .basis import build_basis, materialize_dense
from .cvp import ALGORITHMS
from .vecio import VectorFileError, format_vector, read_vectors, write_vectors
from .verify import verify

__all__ = ["main", "solve_file"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def solve_file(input_path, output_path, algorithm: str = "lin", fmt: str = "csv") -> int:
    """Solve every vector in ``input_path`` and write results in input order.

    ``csv`` output is a vector file of closest points; ``json`` output is a
    list of ``{"point", "coeffs", "k"}`` objects.  Returns the vector count.
    """
    if algorithm not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {algorithm!r}")
    targets = read_vectors(input_path)
    results = []
    if len(targets):
        basis = build_basis(targets.shape[1])
        solve = ALGORITHMS[algorithm]
        kwargs = {"dense": materialize_dense(basis)} if algorithm == "cv" else {}
        results = [solve(basis, y, **kwargs) for y in targets]
    with _output(output_path) as fh:
        if fmt == "json":
            payload = [
                {"point": s.point.tolist(), "coeffs": s.coeffs.tolist(), "k": s.k}
                for s in results
            ]
            json.dump(payload, fh)
            fh.write("\n")
        else:
            write_vectors(fh, (s.point for s in results))
    return len(results)


def _cmd_gen(args) -> int:
    with _output(args.out) as fh:
        for v in bench.gen_targets(args.n, args.count, args.seed, args.lo, args.hi):
            fh.write(format_vector(v))
            fh.write("\n")
    return EXIT_OK


def _cmd_solve(args) -> int:
    count = solve_file(args.input, args.out, args.algo, args.format)
    if args.out not in (None, "-"):
        print(f"solved {count} vectors", file=sys.stderr)
    return EXIT_OK


def _split_ints(values, default):
    if not values:
        return list(default)
    out = []
    for v in values:
        out.extend(int(p) for p in str(v).split(",") if p)
    return out


def _cmd_bench(args) -> int:
    algos = args.algo or ["cv", "qlin", "lin"]
    if "all" in algos:
        algos = ["cv", "qlin", "lin"]
    try:
        dims = _split_ints(args.n, (128, 256, 512))
    except ValueError as exc:
        raise UsageError(f"bad --n value: {exc}") from None
    records = [
        bench.run_bench(a, n, args.trials, args.seed, args.warmup)
        for n in dims
        for a in algos
    ]
    text = bench.records_to_json(records) if args.format == "json" else bench.records_to_csv(records)
    with _output(args.out) as fh:
        fh.write(text)
    return EXIT_OK


def _cmd_verify(args) -> int:
    report = verify(args.n, args.trials, args.seed)
    if args.format == "json":
        text = json.dumps(report.as_dict(), indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["property", "n", "passed", "total", "status"])
        for c in report.counts:
            writer.writerow([c.name, c.n, c.passed, c.total, "pass" if c.ok else "FAIL"])
        text = buf.getvalue()
    with _output(args.out) as fh:
        fh.write(text)
    for name, (passed, total) in report.totals().items():
        print(f"{name}: {passed}/{total}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trilattice",
        description="Closest-vector solvers for triangular lattices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=True):
        p.add_argument("--seed", type=_u64, default=0)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        if fmt:
            p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("gen", help="write seeded uniform target vectors")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", "--trials", dest="count", type=int, default=10_000)
    p.add_argument("--lo", type=float, default=-100.0)
    p.add_argument("--hi", type=float, default=100.0)
    common(p, fmt=False)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("solve", help="solve every vector in a file")
    p.add_argument("input")
    p.add_argument("--algo", choices=sorted(ALGORITHMS), default="lin")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("bench", help="time the solvers on seeded targets")
    p.add_argument("--algo", action="append", choices=sorted(ALGORITHMS) + ["all"])
    p.add_argument("--n", action="append", help="dimension(s), repeatable or comma separated")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--warmup", type=int, default=100)
    common(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("verify", help="run oracle, agreement and invariant checks")
    p.add_argument("--n", type=int, default=512, help="largest dimension checked")
    p.add_argument("--trials", type=int, default=1000, help="targets per dimension")
    common(p)
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, VectorFileError, ValueError, OSError) as exc:
        print(f"trilattice {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
