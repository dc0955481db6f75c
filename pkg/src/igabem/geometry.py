"""Parametric boundary curves, meshes and polygonal approximations.

Curves map a parameter interval ``[a, b]`` into the plane.  The outward
normal is ``outward_sign * (C2', -C1') / |C'|``: for a counterclockwise
closed curve the sign ``+1`` points out of the enclosed region, and hole
boundaries parametrized clockwise keep ``+1`` for the domain-outward
direction of an annular region.

Meshes are uniform partitions of the parameter interval; their images are
the curvilinear boundary elements.  A polygonal boundary interpolates the
element endpoints with straight chords and reuses the same parameter
intervals, so it can stand in for the curve everywhere downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from igabem.splines import SplineSpace, evaluate, insert_knot


class GeometryError(ValueError):
    """Invalid curve data, degenerate parametrization or bad mesh request."""


@dataclass(frozen=True)
class CurveFrame:
    """Point, derivative, jacobian and unit outward normal batches."""

    points: np.ndarray      # (2, n)
    derivatives: np.ndarray  # (2, n)
    jacobians: np.ndarray    # (n,)
    normals: np.ndarray      # (2, n)


def _frame_from_derivatives(points, derivs, outward_sign):
    jac = np.hypot(derivs[0], derivs[1])
    if np.any(jac <= 0.0) or not np.all(np.isfinite(jac)):
        raise GeometryError("vanishing curve derivative at an evaluation point")
    normals = outward_sign * np.vstack([derivs[1], -derivs[0]]) / jac
    return CurveFrame(points, derivs, jac, normals)


@dataclass(frozen=True)
class BsplineCurve:
    """Plane curve in B-form with an orientation convention.

    Parameters
    ----------
    space : SplineSpace
        Spline space of the coordinate functions.
    control_points : ndarray, shape (dimension, 2)
        Control points ``Q_i``.
    outward_sign : int
        ``+1`` or ``-1``; fixes which side the normal points to.
    """

    space: SplineSpace
    control_points: np.ndarray = field(repr=False)
    outward_sign: int = 1

    def __post_init__(self):
        q = np.asarray(self.control_points, dtype=float)
        if q.ndim != 2 or q.shape != (self.space.dimension, 2):
            raise GeometryError(
                f"control point array must be ({self.space.dimension}, 2), got {q.shape}"
            )
        if self.outward_sign not in (-1, 1):
            raise GeometryError("outward_sign must be +1 or -1")
        object.__setattr__(self, "control_points", q)

    @property
    def a(self) -> float:
        return self.space.domain[0]

    @property
    def b(self) -> float:
        return self.space.domain[1]

    @property
    def closed(self) -> bool:
        q = self.control_points
        scale = 1.0 + np.abs(q).max()
        return bool(np.linalg.norm(q[0] - q[-1]) <= 1e-14 * scale)

    @property
    def breakpoints(self) -> np.ndarray:
        return self.space.breakpoints

    def point(self, ts, side="right") -> np.ndarray:
        return evaluate(self.space, self.control_points, ts, 0, side=side)[0].T

    def frame(self, ts, side="right") -> CurveFrame:
        vals = evaluate(self.space, self.control_points, ts, 1, side=side)
        return _frame_from_derivatives(vals[0].T, vals[1].T, self.outward_sign)

    def second_derivative(self, ts, side="right") -> np.ndarray:
        return evaluate(self.space, self.control_points, ts, 2, side=side)[2].T

    def curvature(self, ts, side="right") -> np.ndarray:
        """Signed curvature consistent with the outward-normal convention."""
        vals = evaluate(self.space, self.control_points, ts, 2, side=side)
        d, dd = vals[1].T, vals[2].T
        jac = np.hypot(d[0], d[1])
        return self.outward_sign * (d[0] * dd[1] - d[1] * dd[0]) / jac**3

    def refine_uniform(self) -> "BsplineCurve":
        """Insert the midpoint of every breakpoint interval; geometry unchanged."""
        space, coeffs = self.space, self.control_points
        bp = space.breakpoints
        for t_hat in 0.5 * (bp[:-1] + bp[1:]):
            space, coeffs = insert_knot(space, coeffs, float(t_hat))
        return BsplineCurve(space, coeffs, self.outward_sign)


@dataclass(frozen=True)
class AnalyticCurve:
    """Curve given by explicit parametric callables (vectorized over t).

    ``fn``/``dfn``/``d2fn`` map a parameter array to arrays of shape (2, n).
    Used for boundaries that are not in B-form, e.g. an exact circle.
    """

    fn: object
    dfn: object
    interval: tuple[float, float]
    closed: bool
    outward_sign: int = 1
    d2fn: object = None
    n_breakpoints: int = 1

    @property
    def a(self) -> float:
        return float(self.interval[0])

    @property
    def b(self) -> float:
        return float(self.interval[1])

    @property
    def breakpoints(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n_breakpoints + 1)

    def point(self, ts, side="right") -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return np.asarray(self.fn(ts), dtype=float)

    def frame(self, ts, side="right") -> CurveFrame:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        points = np.asarray(self.fn(ts), dtype=float)
        derivs = np.asarray(self.dfn(ts), dtype=float)
        return _frame_from_derivatives(points, derivs, self.outward_sign)

    def second_derivative(self, ts, side="right") -> np.ndarray:
        if self.d2fn is None:
            raise GeometryError("curve has no second derivative callable")
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return np.asarray(self.d2fn(ts), dtype=float)

    def curvature(self, ts, side="right") -> np.ndarray:
        d = np.asarray(self.dfn(ts), dtype=float)
        dd = self.second_derivative(ts)
        jac = np.hypot(d[0], d[1])
        return self.outward_sign * (d[0] * dd[1] - d[1] * dd[0]) / jac**3


def unit_circle(outward_sign: int = 1) -> AnalyticCurve:
    """Counterclockwise unit circle parametrized by angle on [0, 2*pi]."""
    return AnalyticCurve(
        fn=lambda t: np.vstack([np.cos(t), np.sin(t)]),
        dfn=lambda t: np.vstack([-np.sin(t), np.cos(t)]),
        d2fn=lambda t: np.vstack([-np.cos(t), -np.sin(t)]),
        interval=(0.0, 2.0 * np.pi),
        closed=True,
        outward_sign=outward_sign,
    )


@dataclass(frozen=True)
class BoundaryMesh:
    """Uniform partition of a curve's parameter interval."""

    curve: object
    elements: np.ndarray = field(repr=False)  # (n, 2) parameter intervals
    h: float

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    def element(self, i) -> tuple[float, float]:
        return float(self.elements[i, 0]), float(self.elements[i, 1])


def corner_params(curve) -> np.ndarray:
    """Interior parameters where the curve tangent may be discontinuous.

    B-form curves can lose tangent continuity at breakpoints of knot
    multiplicity ``order - 1`` or higher; every polygon junction is a
    potential corner; analytic curves are taken as smooth.
    """
    if isinstance(curve, PolygonalBoundary):
        return curve.param_breaks[1:-1]
    if isinstance(curve, BsplineCurve):
        bp = curve.space.breakpoints[1:-1]
        mult = curve.space.multiplicities
        return bp[mult >= curve.space.order - 1]
    return np.empty(0)


def induced_mesh(curve, n_elements: int) -> BoundaryMesh:
    """Mesh the parameter interval into ``n_elements`` equal pieces.

    Potential corner parameters of the curve must coincide with element
    endpoints so that singular-pair handling sees corners only at shared
    endpoints; closed curves need at least three elements for the
    adjacency classification to stay unambiguous.
    """
    if n_elements < 1:
        raise GeometryError("need at least one element")
    if getattr(curve, "closed", False) and n_elements < 3:
        raise GeometryError("closed curves need at least three elements")
    a, b = curve.a, curve.b
    ends = np.linspace(a, b, n_elements + 1)
    h = (b - a) / n_elements
    corners = corner_params(curve)
    if corners.size:
        off = np.abs(corners[:, None] - ends[None, :]).min(axis=1)
        if np.any(off > 1e-9 * (b - a)):
            raise GeometryError("curve corners must align with element endpoints")
    elements = np.column_stack([ends[:-1], ends[1:]])
    return BoundaryMesh(curve, elements, h)


@dataclass(frozen=True)
class PolygonalBoundary:
    """Chord polygon through the mesh points, parametrized like the curve.

    On every parameter interval of the source mesh the map is the straight
    chord between the element endpoints, so jacobians and normals are
    piecewise constant and the polygon can replace the curve in assembly.
    """

    vertices: np.ndarray = field(repr=False)   # (n + 1, 2), repeated first point if closed
    param_breaks: np.ndarray = field(repr=False)  # (n + 1,)
    closed: bool
    outward_sign: int = 1

    @property
    def a(self) -> float:
        return float(self.param_breaks[0])

    @property
    def b(self) -> float:
        return float(self.param_breaks[-1])

    @property
    def breakpoints(self) -> np.ndarray:
        return self.param_breaks

    @property
    def n_segments(self) -> int:
        return self.vertices.shape[0] - 1

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.vertices, axis=0), axis=1)

    def _locate(self, ts):
        idx = np.searchsorted(self.param_breaks, ts, side="right") - 1
        return np.clip(idx, 0, self.n_segments - 1)

    def point(self, ts, side="right") -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        idx = self._locate(ts)
        t0 = self.param_breaks[idx]
        dt = self.param_breaks[idx + 1] - t0
        lam = (ts - t0) / dt
        v0 = self.vertices[idx]
        v1 = self.vertices[idx + 1]
        return (v0 + lam[:, None] * (v1 - v0)).T

    def frame(self, ts, side="right") -> CurveFrame:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        idx = self._locate(ts)
        dt = self.param_breaks[idx + 1] - self.param_breaks[idx]
        chord = (self.vertices[idx + 1] - self.vertices[idx]).T
        derivs = chord / dt
        return _frame_from_derivatives(self.point(ts), derivs, self.outward_sign)

    def total_length(self) -> float:
        return float(self.segment_lengths.sum())


def polygonal_boundary(curve, mesh: BoundaryMesh) -> PolygonalBoundary:
    """Polygon interpolating the curve at the mesh element endpoints."""
    ends = np.concatenate([mesh.elements[:, 0], mesh.elements[-1:, 1]])
    vertices = curve.point(ends).T
    if getattr(curve, "closed", False):
        vertices[-1] = vertices[0]
    return PolygonalBoundary(
        vertices=vertices,
        param_breaks=ends,
        closed=bool(getattr(curve, "closed", False)),
        outward_sign=getattr(curve, "outward_sign", 1),
    )


def arclength(curve, n_panels: int = 200, order: int = 16) -> float:
    """Composite Gauss approximation of the curve length."""
    from igabem.quadrature import gauss_legendre

    rule = gauss_legendre(order)
    ends = np.linspace(curve.a, curve.b, n_panels + 1)
    total = 0.0
    for lo, hi in zip(ends[:-1], ends[1:]):
        ts = lo + (hi - lo) * rule.nodes
        total += (hi - lo) * float(rule.weights @ curve.frame(ts).jacobians)
    return total


def contains_point(curve_or_curves, x, n_samples: int = 2048) -> bool:
    """Winding-number test of a point against one or more closed curves."""
    curves = curve_or_curves if isinstance(curve_or_curves, (list, tuple)) else [curve_or_curves]
    angle = 0.0
    for curve in curves:
        ts = np.linspace(curve.a, curve.b, n_samples + 1)
        pts = curve.point(ts) - np.asarray(x, dtype=float)[:, None]
        ang = np.arctan2(pts[1], pts[0])
        dang = np.diff(ang)
        dang = (dang + np.pi) % (2 * np.pi) - np.pi
        angle += dang.sum()
    return bool(abs(angle) > np.pi)
