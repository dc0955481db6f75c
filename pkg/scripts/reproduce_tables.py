#!/usr/bin/env python3
"""Regenerate every benchmark result table into CSV files.

Usage::

    python scripts/reproduce_tables.py [--out out/tables] [--quad-order 16] [--quick]

``--quick`` trims the most expensive rows (finest meshes and the full degree
sweeps) so the whole script finishes in well under a minute.
"""

import argparse
import sys
import time

from igabem.assembly import QuadratureConfig
from igabem.experiments import ExperimentSpec, emit_outputs, format_csv, run_builtin


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/tables")
    parser.add_argument("--quad-order", type=int, default=16)
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args(argv)
    quad = QuadratureConfig(order=args.quad_order)
    levels = 3 if args.quick else 4

    jobs = [
        ("corner domain, plain knots",
         ExperimentSpec("example1", "iga-sgbem", levels=levels, variant="t1", quadrature=quad)),
        ("corner domain, jump knots",
         ExperimentSpec("example1", "iga-sgbem", levels=levels, variant="t2", quadrature=quad)),
        ("corner domain, Lagrange",
         ExperimentSpec("example1", "c-sgbem", levels=levels, quadrature=quad)),
        ("smooth domain, cubic C2 splines",
         ExperimentSpec("example2", "iga-sgbem", degree=3, levels=levels, quadrature=quad)),
        ("smooth domain, cubic C1 splines",
         ExperimentSpec("example2", "iga-sgbem", levels=levels, smoothness="c1", quadrature=quad)),
        ("smooth domain, cubic Lagrange",
         ExperimentSpec("example2", "c-sgbem", degree=3, levels=levels, quadrature=quad)),
        ("smooth domain, cubic polygonal",
         ExperimentSpec("example2", "s-sgbem", degree=3, levels=levels, quadrature=quad)),
        ("smooth domain, DoF-matched splines",
         ExperimentSpec("example2", "iga-sgbem", degree=3,
                        elements=(22, 46) if args.quick else (22, 46, 94), quadrature=quad)),
        ("annulus A", ExperimentSpec("example3", "iga-sgbem", variant="a", quadrature=quad)),
        ("annulus B", ExperimentSpec("example3", "iga-sgbem", variant="b", quadrature=quad)),
        ("annulus A, Lagrange", ExperimentSpec("example3", "c-sgbem", variant="a", quadrature=quad)),
        ("open arc, Galerkin splines",
         ExperimentSpec("example4", "iga-sgbem", levels=levels + 1, quadrature=quad)),
        ("open arc, collocation",
         ExperimentSpec("example4", "iga-collocation", levels=levels + 1, quadrature=quad)),
        ("open arc, Lagrange",
         ExperimentSpec("example4", "c-sgbem", elements=(20, 40) if args.quick else (20, 40, 80),
                        quadrature=quad)),
        ("open arc, polygonal",
         ExperimentSpec("example4", "s-sgbem", elements=(20, 40) if args.quick else (20, 40, 80),
                        quadrature=quad)),
    ]
    if not args.quick:
        for degree in range(3, 10):
            jobs.append((f"smooth domain degree {degree} splines",
                         ExperimentSpec("example2", "iga-sgbem", degree=degree, quadrature=quad)))
            jobs.append((f"smooth domain degree {degree} Lagrange",
                         ExperimentSpec("example2", "c-sgbem", degree=degree, quadrature=quad)))

    for label, spec in jobs:
        t0 = time.perf_counter()
        rows = run_builtin(spec)
        paths = emit_outputs(rows, spec, args.out)
        print(f"== {label} [{time.perf_counter() - t0:.1f}s] -> {paths['csv']}")
        sys.stdout.write(format_csv(rows))
    return 0


if __name__ == "__main__":
    sys.exit(main())
