"""Built-in benchmark experiments and the generic refinement runner.

Four built-in problems (see ``igabem.gallery``) with up to four methods:

* ``iga-sgbem``       Galerkin with the boundary's own B-spline basis,
* ``c-sgbem``         Galerkin with Lagrangian basis on the exact curve,
* ``s-sgbem``         Galerkin with discontinuous Lagrangian basis on the
                      chord polygon (formula data evaluated on the polygon,
                      integral data carried over from the curve by parameter),
* ``iga-collocation`` collocation at the Greville abscissae (Dirichlet).

Error column conventions follow the benchmark tables: relative L2 errors of
the flux are measured in the parameter interval; maximum errors of Galerkin
solutions are taken at the mesh nodes and of collocation solutions on a
dense element-interior grid.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from igabem import gallery
from igabem.assembly import (
    BoundaryPart,
    BvpProblem,
    PointwiseDatum,
    QuadratureConfig,
    SingleLayerDatum,
    TransplantedDatum,
    assemble_collocation,
    assemble_system,
    solve_collocation,
    solve_symmetric,
    spectral_condition,
)
from igabem.geometry import induced_mesh, polygonal_boundary
from igabem.postprocess import (
    convergence_orders,
    max_error,
    max_error_at_nodes,
    relative_l2_error,
)
from igabem.spaces import bspline_space, lagrange_space, polygonal_space
from igabem.splines import SplineSpace


class ExperimentError(ValueError):
    """Unsupported example/method combination or bad configuration."""


METHOD_ALIASES = {
    "iga": "iga-sgbem",
    "iga-sgbem": "iga-sgbem",
    "curvilinear": "c-sgbem",
    "c-sgbem": "c-sgbem",
    "standard": "s-sgbem",
    "s-sgbem": "s-sgbem",
    "collocation": "iga-collocation",
    "iga-collocation": "iga-collocation",
}


@dataclass(frozen=True)
class ExperimentSpec:
    """One refinement study: problem source plus method configuration."""

    source: str                  # "example1".."example4" or a file path
    method: str = "iga-sgbem"
    degree: int = None
    levels: int = 1
    variant: str = None
    smoothness: str = None       # example 2 B-spline continuity: "c2" (default) or "c1"
    quadrature: QuadratureConfig = QuadratureConfig()
    elements: tuple = None       # explicit element counts, overrides the level ladder

    def __post_init__(self):
        method = METHOD_ALIASES.get(self.method)
        if method is None:
            raise ExperimentError(f"unknown method {self.method!r}")
        object.__setattr__(self, "method", method)
        if self.levels < 1 and not self.elements:
            raise ExperimentError("need at least one refinement level")


@dataclass
class ResultRow:
    """One line of a refinement table."""

    h: float
    dof: int
    cond: float
    error: float
    order: float
    seconds: float
    extras: dict = field(default_factory=dict, repr=False)


def _with_orders(rows):
    for prev, row in zip(rows[:-1], rows[1:]):
        if np.isfinite(prev.error) and np.isfinite(row.error) and row.error > 0:
            row.order = float(convergence_orders([prev.error, row.error])[0])
    return rows


# ---------------------------------------------------------------------------
# Space builders shared by the examples
# ---------------------------------------------------------------------------


def _refined(space: SplineSpace, times: int) -> SplineSpace:
    for _ in range(times):
        space = space.with_midpoints_inserted()
    return space


def _iga_case(curve, n, knot_space, identify):
    mesh = induced_mesh(curve, n)
    return curve, mesh, bspline_space(knot_space, mesh, identify_closure=identify)


def _lagrange_case(curve, n, degree, jumps=()):
    mesh = induced_mesh(curve, n)
    return curve, mesh, lagrange_space(mesh, degree, discontinuous_at=jumps)


def _polygon_case(curve, n, degree):
    mesh = induced_mesh(curve, n)
    poly = polygonal_boundary(curve, mesh)
    space, poly_mesh = polygonal_space(poly, degree)
    return poly, poly_mesh, space, mesh


# ---------------------------------------------------------------------------
# Example definitions
# ---------------------------------------------------------------------------


def _neg_sum_flux(curve):
    def exact(ts):
        fr = curve.frame(np.atleast_1d(ts))
        return (fr.derivatives[0] - fr.derivatives[1]) / fr.jacobians

    return exact


def _run_dirichlet_flux(spec, curve, base_n, base_space=None, jumps=(),
                        identify=False, refit=None):
    """Interior Dirichlet benchmark: datum -(x1+x2), flux error in L2."""
    datum = PointwiseDatum(lambda x, y: -(x + y))
    exact = _neg_sum_flux(curve)
    rows = []
    for n in _element_ladder(spec, base_n):
        t0 = time.perf_counter()
        if spec.method == "iga-sgbem":
            knot_space = refit(n) if refit else _refined(base_space, _level_of(n, base_n))
            part_curve, mesh, space = _iga_case(curve, n, knot_space, identify)
            datum_used = datum
        elif spec.method == "c-sgbem":
            part_curve, mesh, space = _lagrange_case(curve, n, spec.degree, jumps)
            datum_used = datum
        elif spec.method == "s-sgbem":
            # Formula data are evaluated at the polygon's own points; only
            # integral data need carrying over from the true curve.
            part_curve, mesh, space, _ = _polygon_case(curve, n, spec.degree)
            datum_used = datum
        else:
            raise ExperimentError(f"{spec.method} not available for this example")
        part = BoundaryPart(part_curve, mesh, "dirichlet", datum_used, space)
        system = assemble_system(BvpProblem([part]), spec.quadrature)
        coeffs = solve_symmetric(system)[id(part)]
        cond = spectral_condition(system.matrix)
        err = relative_l2_error(space, coeffs, exact, mesh, part_curve, measure="parameter")
        rows.append(ResultRow(
            h=(curve.b - curve.a) / n, dof=space.dof_count, cond=cond,
            error=err, order=np.nan, seconds=time.perf_counter() - t0,
        ))
    return _with_orders(rows)


def _run_example1(spec: ExperimentSpec):
    variant = spec.variant or "t1"
    if variant not in ("t1", "t2"):
        raise ExperimentError("example 1 variants are 't1' and 't2'")
    curve = gallery.pacman_curve(jumpy_knots=(variant == "t2"))
    degree = 2 if spec.degree is None else spec.degree
    if spec.method == "iga-sgbem" and degree != 2:
        raise ExperimentError("example 1 geometry is quadratic; IGA degree is 2")
    spec = _with_degree(spec, degree)
    # The flux jumps at the corner parameters and across the closure.
    return _run_dirichlet_flux(
        spec, curve, base_n=9, base_space=curve.space,
        jumps=(0.0, 1.0, 8.0), identify=False,
    )


def _run_example2(spec: ExperimentSpec):
    curve = gallery.freeform_curve()
    degree = 3 if spec.degree is None else spec.degree
    spec = _with_degree(spec, degree)
    smoothness = spec.smoothness or "c2"
    if spec.method == "iga-sgbem":
        if degree < 3:
            raise ExperimentError("example 2 IGA needs degree >= 3 (cubic geometry)")
        if smoothness == "c2":
            def refit(n):
                mult = (degree - 2) * np.ones(n - 1, dtype=int)
                return SplineSpace.from_breakpoints(degree + 1, np.linspace(0, 1, n + 1), mult)
        elif smoothness == "c1":
            if degree != 3:
                raise ExperimentError("the C1 variant is defined for degree 3")
            base = SplineSpace.from_breakpoints(4, np.linspace(0, 1, 9), 2 * np.ones(7, dtype=int))

            def refit(n):
                return _refined(base, _level_of(n, 8))
        else:
            raise ExperimentError("example 2 smoothness is 'c2' or 'c1'")
        return _run_dirichlet_flux(spec, curve, base_n=8, identify=True, refit=refit)
    base_n = 6 if spec.method == "s-sgbem" else 8
    return _run_dirichlet_flux(spec, curve, base_n=base_n)


def _run_example3(spec: ExperimentSpec):
    variant = spec.variant or "a"
    if variant not in ("a", "b"):
        raise ExperimentError("example 3 variants are 'a' and 'b'")
    outer, inner = gallery.annulus_curves(variant)
    base_n = 6 if variant == "a" else 5
    geometry_degree = outer.space.degree
    degree = geometry_degree if spec.degree is None else spec.degree
    rows = []
    for n in _element_ladder(spec, base_n):
        t0 = time.perf_counter()
        level = _level_of(n, base_n)
        if spec.method == "iga-sgbem":
            if degree != geometry_degree:
                raise ExperimentError("example 3 IGA uses the geometry degree")
            _, mesh_i, space_i = _iga_case(inner, n, _refined(inner.space, level), True)
            _, mesh_o, space_o = _iga_case(outer, n, _refined(outer.space, level), True)
        elif spec.method == "c-sgbem":
            _, mesh_i, space_i = _lagrange_case(inner, n, degree)
            _, mesh_o, space_o = _lagrange_case(outer, n, degree)
        else:
            raise ExperimentError("example 3 supports iga-sgbem and c-sgbem")
        p_dir = BoundaryPart(
            inner, mesh_i, "dirichlet",
            PointwiseDatum(lambda x, y: np.ones_like(x)), space_i,
        )
        p_neu = BoundaryPart(
            outer, mesh_o, "neumann",
            PointwiseDatum(lambda x, y: np.zeros_like(x)), space_o,
        )
        problem = BvpProblem([p_dir, p_neu])
        system = assemble_system(problem, spec.quadrature)
        sol = solve_symmetric(system)
        flux_err = max_error(space_i, sol[id(p_dir)], lambda ts: np.zeros_like(np.atleast_1d(ts)), mesh_i)
        trace_err = max_error(space_o, sol[id(p_neu)], lambda ts: np.ones_like(np.atleast_1d(ts)), mesh_o)
        rows.append(ResultRow(
            h=1.0 / n, dof=system.order, cond=spectral_condition(system.matrix),
            error=max(flux_err, trace_err), order=np.nan,
            seconds=time.perf_counter() - t0,
            extras={"flux_max_error": flux_err, "trace_max_error": trace_err,
                    "problem": problem, "solution": sol},
        ))
    return _with_orders(rows)


def _run_example4(spec: ExperimentSpec):
    curve = gallery.parabola_arc()
    degree = 2 if spec.degree is None else spec.degree
    spec = _with_degree(spec, degree)
    datum = SingleLayerDatum(lambda ts: np.sqrt(1.0 + 4.0 * ts**2))
    exact = lambda ts: np.sqrt(1.0 + 4.0 * np.atleast_1d(ts) ** 2)
    rows = []
    for n in _element_ladder(spec, base_n=10):
        t0 = time.perf_counter()
        if spec.method in ("iga-sgbem", "iga-collocation"):
            if degree != 2:
                raise ExperimentError("example 4 IGA uses the quadratic geometry degree")
            knot_space = SplineSpace.from_breakpoints(3, np.linspace(-1, 1, n + 1))
            part_curve, mesh, space = _iga_case(curve, n, knot_space, False)
            datum_used = datum
        elif spec.method == "c-sgbem":
            part_curve, mesh, space = _lagrange_case(curve, n, degree)
            datum_used = datum
        else:
            part_curve, mesh, space, src_mesh = _polygon_case(curve, n, degree)
            datum_used = TransplantedDatum(datum, curve, src_mesh, spec.quadrature.order)
        part = BoundaryPart(part_curve, mesh, "dirichlet", datum_used, space)
        problem = BvpProblem([part], exterior_arc=True)
        if spec.method == "iga-collocation":
            matrix, rhs, _ = assemble_collocation(problem, spec.quadrature)
            coeffs = solve_collocation(matrix, rhs)
            cond = spectral_condition(matrix, symmetric=False)
            err = max_error(space, coeffs, exact, mesh)
        else:
            system = assemble_system(problem, spec.quadrature)
            coeffs = solve_symmetric(system)[id(part)]
            cond = spectral_condition(system.matrix)
            err = max_error_at_nodes(space, coeffs, exact, mesh)
        rows.append(ResultRow(
            h=2.0 / n, dof=space.dof_count, cond=cond, error=err,
            order=np.nan, seconds=time.perf_counter() - t0,
            extras={"coefficients": coeffs},
        ))
    return _with_orders(rows)


_RUNNERS = {
    "example1": _run_example1,
    "example2": _run_example2,
    "example3": _run_example3,
    "example4": _run_example4,
}


def _with_degree(spec: ExperimentSpec, degree: int) -> ExperimentSpec:
    if spec.degree == degree:
        return spec
    return ExperimentSpec(
        source=spec.source, method=spec.method, degree=degree, levels=spec.levels,
        variant=spec.variant, smoothness=spec.smoothness, quadrature=spec.quadrature,
        elements=spec.elements,
    )


def _element_ladder(spec: ExperimentSpec, base_n: int):
    if spec.elements:
        return list(spec.elements)
    return [base_n * 2**level for level in range(spec.levels)]


def _level_of(n: int, base_n: int) -> int:
    level = int(round(np.log2(n / base_n)))
    if base_n * 2**level != n:
        raise ExperimentError(
            f"element count {n} is not on the refinement ladder of base {base_n}"
        )
    return level


def run_builtin(spec: ExperimentSpec):
    """Run one built-in benchmark and return its table rows."""
    runner = _RUNNERS.get(spec.source)
    if runner is None:
        raise ExperimentError(f"unknown built-in problem {spec.source!r}")
    return runner(spec)


# ---------------------------------------------------------------------------
# Problem files
# ---------------------------------------------------------------------------


def run_problem(path, spec: ExperimentSpec = None):
    """Run a problem file through the same pipeline as the built-ins.

    Command-line options (method, degree, levels, quadrature) override the
    file's own configuration when provided in ``spec``.
    """
    from igabem.problem_file import load_problem_file

    cfg = load_problem_file(path)
    method = METHOD_ALIASES.get((spec and spec.method) or cfg["method"])
    if method is None:
        raise ExperimentError(f"unknown method in problem file: {cfg['method']!r}")
    degree = (spec and spec.degree) or cfg["degree"]
    levels = spec.levels if spec is not None else cfg["levels"]
    quad = spec.quadrature if spec is not None else QuadratureConfig(cfg["quad_order"])
    curves = cfg["curves"]
    exterior_arc = len(curves) == 1 and not curves[0].closed
    if exterior_arc and any(bc["role"] != "dirichlet" for bc in cfg["bcs"]):
        raise ExperimentError("open-arc problems are Dirichlet-only")

    rows = []
    for level in range(levels):
        t0 = time.perf_counter()
        parts = []
        part_geometry = []
        for curve, bc, base_n in zip(curves, cfg["bcs"], cfg["base_elements"]):
            n = base_n * 2**level
            datum = bc["datum"]
            if method == "iga-sgbem" or method == "iga-collocation":
                knot_space = _refined(curve.space, _file_level(curve, n))
                part_curve, mesh, space = _iga_case(curve, n, knot_space, curve.closed)
            elif method == "c-sgbem":
                d = curve.space.degree if degree is None else degree
                part_curve, mesh, space = _lagrange_case(curve, n, d)
            else:
                d = curve.space.degree if degree is None else degree
                part_curve, mesh, space, _ = _polygon_case(curve, n, d)
            parts.append(BoundaryPart(part_curve, mesh, bc["role"], datum, space))
            part_geometry.append((curve, mesh, space))
        problem = BvpProblem(parts, exterior_arc=exterior_arc)
        if method == "iga-collocation":
            matrix, rhs, _ = assemble_collocation(problem, quad)
            coeffs = {id(parts[0]): solve_collocation(matrix, rhs)}
            cond = spectral_condition(matrix, symmetric=False)
        else:
            system = assemble_system(problem, quad)
            coeffs = solve_symmetric(system)
            cond = spectral_condition(system.matrix)
        err = _file_problem_error(cfg["exact_field"], parts, part_geometry, coeffs)
        dof = sum(p.unknown_space.dof_count for p in parts)
        h = min((c.b - c.a) / m.n_elements for c, m, _ in part_geometry)
        rows.append(ResultRow(
            h=h, dof=dof, cond=cond, error=err, order=np.nan,
            seconds=time.perf_counter() - t0,
        ))
    return _with_orders(rows)


def _file_level(curve, n):
    base = curve.breakpoints.size - 1
    return _level_of(n, base)


def _file_problem_error(exact_field, parts, part_geometry, coeffs):
    """Relative L2 error of all unknowns against a harmonic reference field."""
    if exact_field is None:
        return np.nan
    value, gradient = exact_field
    from igabem.quadrature import gauss_legendre

    rule = gauss_legendre(24)
    num = den = 0.0
    for part, (curve, mesh, space) in zip(parts, part_geometry):
        c = coeffs[id(part)]
        for el in range(mesh.n_elements):
            lo, hi = mesh.element(el)
            ts = lo + (hi - lo) * rule.nodes
            fr = part.curve.frame(ts)
            if part.role == "dirichlet":
                gx, gy = gradient(fr.points[0], fr.points[1])
                target = gx * fr.normals[0] + gy * fr.normals[1]
            else:
                target = value(fr.points[0], fr.points[1])
            approx = space.evaluate(c, ts)
            w = (hi - lo) * rule.weights
            num += float(w @ (approx - target) ** 2)
            den += float(w @ target**2)
    return float(np.sqrt(num / den)) if den > 0 else np.nan


# ---------------------------------------------------------------------------
# Output emission
# ---------------------------------------------------------------------------


def format_csv(rows) -> str:
    """CSV text with the fixed column set ``h,dof,cond,error,order,seconds``."""
    if not rows:
        raise ExperimentError("refusing to emit an empty result table")
    lines = ["h,dof,cond,error,order,seconds"]
    for row in rows:
        lines.append(
            f"{row.h!r},{row.dof},{row.cond!r},{row.error!r},{row.order!r},{row.seconds!r}"
        )
    return "\n".join(lines) + "\n"


def parse_csv(text):
    """Inverse of :func:`format_csv` (round-trip tested)."""
    lines = [ln for ln in text.strip().splitlines() if ln]
    header = lines[0].split(",")
    if header != ["h", "dof", "cond", "error", "order", "seconds"]:
        raise ExperimentError("unexpected CSV header")
    rows = []
    for ln in lines[1:]:
        h, dof, cond, error, order, seconds = ln.split(",")
        rows.append(ResultRow(
            h=float(h), dof=int(dof), cond=float(cond), error=float(error),
            order=float(order), seconds=float(seconds),
        ))
    return rows


def format_plot_data(rows) -> str:
    """Plot-data file: one ``dof error`` pair per line (for external tools)."""
    if not rows:
        raise ExperimentError("refusing to emit an empty result table")
    return "\n".join(f"{row.dof} {row.error!r}" for row in rows) + "\n"


def emit_outputs(rows, spec: ExperimentSpec, out_dir) -> dict:
    """Write the CSV table and plot-data file; returns the written paths.

    All columns except ``seconds`` (wall time) are deterministic functions
    of the experiment specification.
    """
    import json
    import os

    os.makedirs(out_dir, exist_ok=True)
    stem = f"{os.path.basename(spec.source).replace('.', '_')}_{spec.method}"
    for tag in (spec.variant, spec.smoothness,
                None if spec.degree is None else f"p{spec.degree}",
                None if not spec.elements else "n" + "-".join(map(str, spec.elements))):
        if tag:
            stem += f"_{tag}"
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    plot_path = os.path.join(out_dir, f"plot_{stem}.dat")
    meta_path = os.path.join(out_dir, f"{stem}.json")
    with open(csv_path, "w") as handle:
        handle.write(format_csv(rows))
    with open(plot_path, "w") as handle:
        handle.write(format_plot_data(rows))
    meta = {
        "source": spec.source,
        "method": spec.method,
        "degree": spec.degree,
        "levels": spec.levels,
        "variant": spec.variant,
        "smoothness": spec.smoothness,
        "quadrature_order": spec.quadrature.order,
        "max_error_grid": "mesh nodes (Galerkin) / 32 interior points per element (collocation)",
        "l2_measure": "parameter interval",
    }
    with open(meta_path, "w") as handle:
        json.dump(meta, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return {"csv": csv_path, "plot": plot_path, "meta": meta_path}
