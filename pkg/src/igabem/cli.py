"""Command line driver: run built-in benchmarks or problem files.

Examples
--------
::

    igabem run example1 --method iga-sgbem --levels 4 --out out/
    igabem run example2 --method c-sgbem --degree 3 --levels 4
    igabem run example4 --method iga-collocation --levels 5
    igabem run file my_problem.toml --levels 2 --out out/

Results print as a table and, with ``--out``, are written as a CSV file
(columns ``h,dof,cond,error,order,seconds``) plus a ``dof error`` plot-data
file and a JSON metadata sidecar.
"""

from __future__ import annotations

import argparse
import sys

from igabem.assembly import QuadratureConfig
from igabem.experiments import (
    ExperimentSpec,
    emit_outputs,
    format_csv,
    run_builtin,
    run_problem,
)

_BUILTINS = ("example1", "example2", "example3", "example4")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="igabem",
        description="2D Laplace symmetric Galerkin BEM benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a built-in benchmark or a problem file")
    run.add_argument("target", help="example1..example4 or 'file'")
    run.add_argument("path", nargs="?", help="problem file path (with target 'file')")
    run.add_argument("--method", default="iga-sgbem",
                     help="iga-sgbem | c-sgbem | s-sgbem | iga-collocation")
    run.add_argument("--degree", type=int, default=None)
    run.add_argument("--levels", type=int, default=1)
    run.add_argument("--variant", default=None, help="example variant (t1/t2, a/b)")
    run.add_argument("--smoothness", default=None, help="example 2 spline continuity (c2/c1)")
    run.add_argument("--quad-order", type=int, default=16)
    run.add_argument("--quad-order-coincident", type=int, default=None)
    run.add_argument("--quad-order-adjacent", type=int, default=None)
    run.add_argument("--quad-order-disjoint", type=int, default=None)
    run.add_argument("--elements", default=None,
                     help="comma-separated element counts overriding the level ladder")
    run.add_argument("--out", default=None, help="output directory for CSV/plot files")
    return parser


def _spec_from_args(args) -> ExperimentSpec:
    quad = QuadratureConfig(
        order=args.quad_order,
        coincident=args.quad_order_coincident,
        adjacent=args.quad_order_adjacent,
        disjoint=args.quad_order_disjoint,
    )
    elements = None
    if args.elements:
        elements = tuple(int(v) for v in args.elements.split(","))
    source = args.target if args.target in _BUILTINS else args.path
    return ExperimentSpec(
        source=source,
        method=args.method,
        degree=args.degree,
        levels=args.levels,
        variant=args.variant,
        smoothness=args.smoothness,
        quadrature=quad,
        elements=elements,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.target in _BUILTINS:
            spec = _spec_from_args(args)
            rows = run_builtin(spec)
        elif args.target == "file":
            if not args.path:
                print("error: 'run file' needs a problem file path", file=sys.stderr)
                return 2
            spec = _spec_from_args(args)
            rows = run_problem(args.path, spec)
        else:
            print(f"error: unknown target {args.target!r} "
                  f"(expected {', '.join(_BUILTINS)} or 'file')", file=sys.stderr)
            return 2
        sys.stdout.write(format_csv(rows))
        if args.out:
            paths = emit_outputs(rows, spec, args.out)
            print(f"wrote {paths['csv']}, {paths['plot']}, {paths['meta']}", file=sys.stderr)
        return 0
    except Exception as exc:  # surface validation/solver diagnostics, exit nonzero
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
