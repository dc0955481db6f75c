"""Interior evaluation, boundary error norms and convergence orders."""

from __future__ import annotations

import numpy as np

from igabem.assembly import BoundaryPart, BvpProblem, SingleLayerDatum
from igabem.kernels import INV_2PI
from igabem.quadrature import gauss_legendre


class PostprocessError(ValueError):
    """Evaluation too close to the boundary or inconsistent inputs."""


class BoundarySolution:
    """Boundary trace and flux evaluators combining data and solved parts."""

    def __init__(self, problem: BvpProblem, coefficients: dict):
        self.problem = problem
        self.coefficients = coefficients

    def part_coefficients(self, part: BoundaryPart) -> np.ndarray:
        return self.coefficients[id(part)]

    def flux(self, part: BoundaryPart):
        """Flux evaluator on one part (solved on Dirichlet parts, datum else)."""
        if part.role == "dirichlet":
            coeffs = self.part_coefficients(part)
            return lambda ts: part.unknown_space.evaluate(coeffs, ts)
        return part.datum.on_curve(part.curve)

    def trace(self, part: BoundaryPart):
        """Trace evaluator on one part (datum on Dirichlet parts, solved else)."""
        if part.role == "neumann":
            coeffs = self.part_coefficients(part)
            return lambda ts: part.unknown_space.evaluate(coeffs, ts)
        if isinstance(part.datum, SingleLayerDatum):
            raise PostprocessError("integral-type datum has no pointwise trace evaluator")
        return part.datum.on_curve(part.curve)


def _boundary_clearance(problem, x):
    dists = []
    sizes = []
    for part in problem.parts:
        ts = np.linspace(part.curve.a, part.curve.b, 40 * part.mesh.n_elements)
        pts = part.curve.point(ts)
        dists.append(np.min(np.hypot(pts[0] - x[0], pts[1] - x[1])))
        chord = np.hypot(*np.diff(part.curve.point(np.linspace(part.curve.a, part.curve.b, part.mesh.n_elements + 1)), axis=1))
        sizes.append(chord.max())
    return min(dists), max(sizes)


def interior_value(solution: BoundarySolution, x, order: int = 16) -> float:
    """Harmonic solution at an interior point from its boundary trace and flux.

    ``u(x) = integral U q - integral (dU/dn_y) u`` over the whole boundary;
    for exterior-arc problems only the single layer of the flux jump.
    Points closer to the boundary than a fifth of an element are rejected
    (regular quadrature breaks down there).
    """
    x = np.asarray(x, dtype=float)
    problem = solution.problem
    dist, size = _boundary_clearance(problem, x)
    if dist < 0.2 * size:
        raise PostprocessError(
            f"evaluation point within the near-boundary guard (distance {dist:.3g})"
        )
    rule = gauss_legendre(order)
    total = 0.0
    for part in problem.parts:
        flux = solution.flux(part)
        trace = None if problem.exterior_arc else solution.trace(part)
        for el in range(part.mesh.n_elements):
            lo, hi = part.mesh.element(el)
            ts = lo + (hi - lo) * rule.nodes
            fr = part.curve.frame(ts)
            w = (hi - lo) * rule.weights * fr.jacobians
            d = fr.points - x[:, None]
            r = np.hypot(d[0], d[1])
            total += float(np.sum(w * (-INV_2PI) * np.log(r) * flux(ts)))
            if trace is not None:
                ddotn = d[0] * fr.normals[0] + d[1] * fr.normals[1]
                kernel = -INV_2PI * ddotn / r**2
                total -= float(np.sum(w * kernel * trace(ts)))
    return total


def _space_degree(space) -> int:
    inner = getattr(space, "space", None)
    if inner is not None:
        return inner.degree
    return getattr(space, "degree", 1)


def relative_l2_error(
    space, coeffs, exact, mesh, curve, order: int = None, measure: str = "arclength"
) -> float:
    """``|g - g_h|_L2 / |g|_L2`` over the boundary.

    ``exact`` maps curve parameters to exact values; quadrature nodes are
    element-interior so jump parameters of the exact solution are avoided.
    ``measure`` selects the arclength weight (default) or the plain
    parameter-interval measure used by the benchmark tables.
    """
    if order is None:
        order = max(2 * _space_degree(space) + 4, 16)
    if measure not in ("arclength", "parameter"):
        raise PostprocessError(f"unknown measure {measure!r}")
    rule = gauss_legendre(order)
    num = den = 0.0
    for el in range(mesh.n_elements):
        lo, hi = mesh.element(el)
        ts = lo + (hi - lo) * rule.nodes
        w = (hi - lo) * rule.weights
        if measure == "arclength":
            w = w * curve.frame(ts).jacobians
        approx = space.evaluate(coeffs, ts)
        target = np.asarray(exact(ts), dtype=float)
        num += float(w @ (approx - target) ** 2)
        den += float(w @ target**2)
    if den == 0.0:
        raise PostprocessError("exact solution has zero norm")
    return float(np.sqrt(num / den))


def max_error(space, coeffs, exact, mesh, samples: int = 32) -> float:
    """Maximum absolute error on an element-interior sample grid."""
    if samples < 10:
        raise PostprocessError("need at least 10 samples per element")
    offsets = (np.arange(samples) + 0.5) / samples
    worst = 0.0
    for el in range(mesh.n_elements):
        lo, hi = mesh.element(el)
        ts = lo + (hi - lo) * offsets
        err = np.abs(space.evaluate(coeffs, ts) - np.asarray(exact(ts), dtype=float))
        worst = max(worst, float(err.max()))
    return worst


def max_error_at_nodes(space, coeffs, exact, mesh) -> float:
    """Maximum absolute error over the mesh nodes (element endpoints).

    Galerkin spline solutions superconverge at the nodes; this is the grid
    on which the benchmark tables report their maximum errors.  Both
    one-sided values are taken at every node.
    """
    worst = 0.0
    for el in range(mesh.n_elements):
        lo, hi = mesh.element(el)
        ts = np.array([lo, hi])
        vals = space.element_shapes(el, ts, 0)
        dofs = space.element_dofs(el)
        active = dofs >= 0
        approx = coeffs[dofs[active]] @ vals[active]
        err = np.abs(approx - np.asarray(exact(ts), dtype=float))
        worst = max(worst, float(err.max()))
    return worst


def convergence_orders(errors, hs=None) -> np.ndarray:
    """Elementwise ``log2(E(2h) / E(h))`` for a mesh-halving error sequence."""
    errors = np.asarray(errors, dtype=float)
    if errors.size < 2:
        raise PostprocessError("need at least two errors")
    if hs is not None:
        hs = np.asarray(hs, dtype=float)
        if np.any(np.abs(hs[:-1] / hs[1:] - 2.0) > 1e-12):
            raise PostprocessError("mesh sizes must halve between entries")
    return np.log2(errors[:-1] / errors[1:])
