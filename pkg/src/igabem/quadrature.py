"""Gaussian rules and singularity-aware integration over element pairs.

Double integrals of kernel times shape products over pairs of boundary
elements are classified as coincident, adjacent (one shared endpoint,
including the closure junction of closed curves) or disjoint:

* disjoint pairs use a tensor Gauss-Legendre rule;
* coincident pairs are split at the diagonal into two triangles in relative
  coordinates; the factor ``ln|s - t|`` of the weakly singular kernel is
  integrated with a log-weighted Gaussian rule and the remaining ratio
  ``ln(r / |s - t|)`` is smooth on regular elements;
* adjacent pairs map the shared endpoint to the origin and apply a Duffy
  substitution, which isolates the same log factor for the weakly singular
  kernel and removes the corner 1/r growth of the double layer kernels.

The ``HYPERSINGULAR`` kind computes the integration-by-parts bilinear form:
tangential derivatives of both shape functions against the weakly singular
kernel.  In parameter space the arclength jacobians cancel, so the
integrand is ``shape_x'(s) U(C(s), C(t)) shape_y'(t)``.  This form is
positive (``n pi / 2`` on circle Fourier modes); the hypersingular operator
of the first-kind system is its negative, applied in ``igabem.assembly``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np

from igabem.geometry import BoundaryMesh
from igabem.kernels import INV_2PI, KernelKind


class QuadratureError(ValueError):
    """Invalid rule request or unusable element pair."""


# ---------------------------------------------------------------------------
# One-dimensional rules on (0, 1)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights on the open unit interval."""

    nodes: np.ndarray
    weights: np.ndarray
    weight_kind: str  # "unit" or "log"


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule mapped to (0, 1); exact to degree 2n-1."""
    if n < 1:
        raise QuadratureError("rule size must be >= 1")
    x, w = np.polynomial.legendre.leggauss(n)
    return QuadratureRule(0.5 * (x + 1.0), 0.5 * w, "unit")


def _log_recurrence(n: int):
    """Exact three-term recurrence coefficients for the weight ln(1/x) on (0,1).

    Chebyshev's algorithm on the exact moments 1/(j+1)^2, carried out in
    rational arithmetic; the classical float version loses all accuracy for
    n beyond ~8, the exact one is stable for any practical size.
    """
    m = [Fraction(1, (j + 1) ** 2) for j in range(2 * n)]
    alphas = [m[1] / m[0]]
    betas = [m[0]]
    sig_prev = [Fraction(0)] * (2 * n)
    sig = list(m)
    for k in range(1, n):
        sig_next = [Fraction(0)] * (2 * n)
        for ell in range(k, 2 * n - k):
            sig_next[ell] = (
                sig[ell + 1] - alphas[k - 1] * sig[ell] - betas[k - 1] * sig_prev[ell]
            )
        alphas.append(sig_next[k + 1] / sig_next[k] - sig[k] / sig[k - 1])
        betas.append(sig_next[k] / sig[k - 1])
        sig_prev, sig = sig, sig_next
    return [float(a) for a in alphas], [float(b) for b in betas]


@lru_cache(maxsize=None)
def gauss_log(n: int) -> QuadratureRule:
    """n-point Gaussian rule for ``integral_0^1 f(x) ln(1/x) dx``.

    Exact for polynomials up to degree 2n-1 against the log weight.
    Golub-Welsch on the Jacobi matrix built from exact-moment recurrences.
    """
    if n < 1:
        raise QuadratureError("rule size must be >= 1")
    alphas, betas = _log_recurrence(n)
    jac = np.diag(alphas)
    off = np.sqrt(betas[1:])
    jac += np.diag(off, 1) + np.diag(off, -1)
    eigvals, eigvecs = np.linalg.eigh(jac)
    weights = betas[0] * eigvecs[0] ** 2
    return QuadratureRule(eigvals, weights, "log")


def rule_on_interval(rule: QuadratureRule, lo: float, hi: float):
    """Affine image of a unit-interval rule (unit weight kind only)."""
    return lo + (hi - lo) * rule.nodes, (hi - lo) * rule.weights


# ---------------------------------------------------------------------------
# Pair classification
# ---------------------------------------------------------------------------


class PairClass(Enum):
    COINCIDENT = "coincident"
    ADJACENT = "adjacent"
    DISJOINT = "disjoint"


@dataclass(frozen=True)
class PairGeometry:
    """Local-to-parameter maps of one element pair.

    Local coordinates run over [0, 1]; for adjacent pairs the origin of each
    side sits at the shared endpoint, so the map is
    ``s = start + direction * h * sigma``.
    """

    pair_class: PairClass
    x_start: float
    x_dir: float
    h_x: float
    y_start: float
    y_dir: float
    h_y: float

    @classmethod
    def forward(cls, pair_class, elem_x, elem_y):
        return cls(
            pair_class,
            elem_x[0], 1.0, elem_x[1] - elem_x[0],
            elem_y[0], 1.0, elem_y[1] - elem_y[0],
        )


def classify_pair(mesh: BoundaryMesh, i: int, j: int) -> PairClass:
    """Coincident, adjacent (shared endpoint, with wraparound on closed
    curves) or disjoint classification of elements ``i`` and ``j``."""
    n = mesh.n_elements
    if not (0 <= i < n and 0 <= j < n):
        raise QuadratureError("element index out of range")
    if i == j:
        return PairClass.COINCIDENT
    if abs(i - j) == 1:
        return PairClass.ADJACENT
    if getattr(mesh.curve, "closed", False) and {i, j} == {0, n - 1}:
        return PairClass.ADJACENT
    return PairClass.DISJOINT


def pair_geometry(mesh: BoundaryMesh, i: int, j: int) -> PairGeometry:
    """Pair class plus local maps; adjacent maps anchor the shared endpoint."""
    cls = classify_pair(mesh, i, j)
    ex, ey = mesh.element(i), mesh.element(j)
    hx, hy = ex[1] - ex[0], ey[1] - ey[0]
    if cls is not PairClass.ADJACENT:
        return PairGeometry.forward(cls, ex, ey)
    n = mesh.n_elements
    if j == i + 1:
        return PairGeometry(cls, ex[1], -1.0, hx, ey[0], 1.0, hy)
    if i == j + 1:
        return PairGeometry(cls, ex[0], 1.0, hx, ey[1], -1.0, hy)
    if i == n - 1 and j == 0:  # wraparound: x ends at b, y starts at a
        return PairGeometry(cls, ex[1], -1.0, hx, ey[0], 1.0, hy)
    return PairGeometry(cls, ex[0], 1.0, hx, ey[1], -1.0, hy)


# ---------------------------------------------------------------------------
# Component tables: precomputed local nodes and weights per pair class
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Component:
    x_local: np.ndarray
    y_local: np.ndarray
    weights: np.ndarray
    mode: str                  # "plain" | "reg" | "const"
    aux: np.ndarray = None     # extracted distance factor for "reg"


def _triangle_components(order: int, logarithmic: bool):
    """Two triangles of the coincident square in relative coordinates.

    On the triangle ``t < s`` with offset ``u = s - t`` the inner node runs
    over ``s in [u, 1]``; the mirrored triangle swaps the roles.  For the
    log kernels the factor ``ln u`` is pulled out and handled by the
    log-weighted rule.
    """
    gl = gauss_legendre(order)
    comps = []
    for outer, mode, sign in ((gl, "reg", 1.0), (gauss_log(order), "const", -1.0)):
        if mode == "reg" and not logarithmic:
            mode = "plain"
        if mode == "const" and not logarithmic:
            continue
        u = outer.nodes[:, None]
        wu = outer.weights[:, None]
        s = u + (1.0 - u) * gl.nodes[None, :]
        w = sign * wu * gl.weights[None, :] * (1.0 - u)
        aux = np.broadcast_to(u, s.shape).ravel() if mode == "reg" else None
        comps.append(_Component(s.ravel(), (s - u).ravel(), w.ravel(), mode, aux))
        comps.append(_Component((s - u).ravel(), s.ravel(), w.ravel(), mode, aux))
    return comps


def _duffy_components(order: int, logarithmic: bool):
    """Duffy substitution for a singularity at the shared local origin.

    Region ``tau <= sigma`` maps to ``(sigma, sigma * u)`` with jacobian
    ``sigma``; the mirrored region swaps the roles.  The radial variable
    (``max(sigma, tau)``) carries the log factor for the weakly singular
    kernels and tames the 1/r growth of the double layer kernels.
    """
    gl = gauss_legendre(order)
    comps = []
    mode = "reg" if logarithmic else "plain"
    rad = gl.nodes[:, None]
    wr = gl.weights[:, None]
    inner = rad * gl.nodes[None, :]
    w = wr * gl.weights[None, :] * rad
    rad_flat = np.broadcast_to(rad, inner.shape).ravel()
    aux = rad_flat if logarithmic else None
    comps.append(_Component(rad_flat, inner.ravel(), w.ravel(), mode, aux))
    comps.append(_Component(inner.ravel(), rad_flat, w.ravel(), mode, aux))
    if logarithmic:
        lg = gauss_log(order)
        rad = lg.nodes[:, None]
        wr = lg.weights[:, None]
        inner = rad * gl.nodes[None, :]
        w = -wr * gl.weights[None, :] * rad
        comps.append(_Component(np.broadcast_to(rad, inner.shape).ravel(), inner.ravel(), w.ravel(), "const"))
        comps.append(_Component(inner.ravel(), np.broadcast_to(rad, inner.shape).ravel(), w.ravel(), "const"))
    return comps


def _tensor_components(order: int):
    gl = gauss_legendre(order)
    x = np.repeat(gl.nodes, order)
    y = np.tile(gl.nodes, order)
    w = np.repeat(gl.weights, order) * np.tile(gl.weights, order)
    return [_Component(x, y, w, "plain")]


@lru_cache(maxsize=None)
def _components(pair_class: PairClass, logarithmic: bool, order: int):
    if pair_class is PairClass.DISJOINT:
        return tuple(_tensor_components(order))
    if pair_class is PairClass.COINCIDENT:
        return tuple(_triangle_components(order, logarithmic))
    return tuple(_duffy_components(order, logarithmic))


# ---------------------------------------------------------------------------
# Pair integration
# ---------------------------------------------------------------------------


def _is_log_kernel(kind: KernelKind) -> bool:
    return kind in (KernelKind.SINGLE_LAYER, KernelKind.HYPERSINGULAR)


def _kernel_factor(kind, comp, frame_x, frame_y):
    """Pointwise kernel factor including arclength jacobians per kind."""
    d = frame_y.points - frame_x.points
    if _is_log_kernel(kind):
        r = np.hypot(d[0], d[1])
        if comp.mode == "plain":
            g = -INV_2PI * np.log(r)
        elif comp.mode == "reg":
            g = -INV_2PI * np.log(r / comp.aux)
        else:
            g = np.full(r.shape, -INV_2PI)
        if kind is KernelKind.SINGLE_LAYER:
            g = g * frame_x.jacobians * frame_y.jacobians
        return g
    r2 = d[0] ** 2 + d[1] ** 2
    if kind is KernelKind.DOUBLE_LAYER:
        ddotn = d[0] * frame_y.normals[0] + d[1] * frame_y.normals[1]
        return -INV_2PI * ddotn / r2 * frame_x.jacobians * frame_y.jacobians
    ddotn = d[0] * frame_x.normals[0] + d[1] * frame_x.normals[1]
    return INV_2PI * ddotn / r2 * frame_x.jacobians * frame_y.jacobians


def _as_shape_matrix(shape, ts, deriv):
    vals = np.asarray(shape(ts, deriv), dtype=float)
    return vals[None, :] if vals.ndim == 1 else vals


def pair_matrix(kind, curve_x, curve_y, pgeo: PairGeometry, shape_x, shape_y, order: int):
    """Double integral of ``shape_x (kernel) shape_y`` over one element pair.

    ``shape_x`` / ``shape_y`` are callables ``f(params, deriv)`` returning
    arrays of shape (n_shapes, n_points); ``deriv=1`` (parameter
    derivatives) is requested for the hypersingular kind.  Returns the
    (n_shapes_x, n_shapes_y) block.
    """
    deriv = 1 if kind is KernelKind.HYPERSINGULAR else 0
    comps = _components(pgeo.pair_class, _is_log_kernel(kind), order)
    total = None
    scale = pgeo.h_x * pgeo.h_y
    for comp in comps:
        s = pgeo.x_start + pgeo.x_dir * pgeo.h_x * comp.x_local
        t = pgeo.y_start + pgeo.y_dir * pgeo.h_y * comp.y_local
        frame_x = curve_x.frame(s)
        frame_y = curve_y.frame(t)
        g = _kernel_factor(kind, comp, frame_x, frame_y)
        w = comp.weights * scale * g
        fx = _as_shape_matrix(shape_x, s, deriv)
        fy = _as_shape_matrix(shape_y, t, deriv)
        block = (fx * w) @ fy.T
        total = block if total is None else total + block
    return total


def classify_elements(curve_x, elem_x, curve_y, elem_y, closed=None) -> PairGeometry:
    """Pair geometry from raw parameter intervals.

    Elements on different curve objects are disjoint.  On one curve, equal
    intervals are coincident, intervals sharing one endpoint (or touching
    across the closure of a closed curve) are adjacent.
    """
    if curve_x is not curve_y:
        return PairGeometry.forward(PairClass.DISJOINT, elem_x, elem_y)
    tol = 1e-12 * (curve_x.b - curve_x.a)
    same = abs(elem_x[0] - elem_y[0]) <= tol and abs(elem_x[1] - elem_y[1]) <= tol
    if same:
        return PairGeometry.forward(PairClass.COINCIDENT, elem_x, elem_y)
    hx, hy = elem_x[1] - elem_x[0], elem_y[1] - elem_y[0]
    closed = curve_x.closed if closed is None else closed
    if abs(elem_x[1] - elem_y[0]) <= tol:
        return PairGeometry(PairClass.ADJACENT, elem_x[1], -1.0, hx, elem_y[0], 1.0, hy)
    if abs(elem_y[1] - elem_x[0]) <= tol:
        return PairGeometry(PairClass.ADJACENT, elem_x[0], 1.0, hx, elem_y[1], -1.0, hy)
    if closed:
        a, b = curve_x.a, curve_x.b
        if abs(elem_x[1] - b) <= tol and abs(elem_y[0] - a) <= tol:
            return PairGeometry(PairClass.ADJACENT, elem_x[1], -1.0, hx, elem_y[0], 1.0, hy)
        if abs(elem_y[1] - b) <= tol and abs(elem_x[0] - a) <= tol:
            return PairGeometry(PairClass.ADJACENT, elem_x[0], 1.0, hx, elem_y[1], -1.0, hy)
    return PairGeometry.forward(PairClass.DISJOINT, elem_x, elem_y)


def integrate_pair(kind, curve_x, elem_x, shape_x, curve_y, elem_y, shape_y, order=16):
    """Classify one element pair and integrate (scalar for single shapes)."""
    pgeo = classify_elements(curve_x, elem_x, curve_y, elem_y)
    out = pair_matrix(kind, curve_x, curve_y, pgeo, shape_x, shape_y, order)
    return float(out[0, 0]) if out.shape == (1, 1) else out


def constant_shape(ts, deriv=0):
    """Unit shape function (zero parameter derivative)."""
    ts = np.atleast_1d(ts)
    return np.ones_like(ts) if deriv == 0 else np.zeros_like(ts)


def as_shape(fn, dfn=None):
    """Wrap plain callables into the (params, deriv) shape protocol."""

    def shape(ts, deriv=0):
        if deriv == 0:
            return np.asarray(fn(ts), dtype=float)
        if dfn is None:
            raise QuadratureError("shape has no derivative callable")
        return np.asarray(dfn(ts), dtype=float)

    return shape


# ---------------------------------------------------------------------------
# Single integrals of the weakly singular kernel
# ---------------------------------------------------------------------------


def single_layer_row(x_point, curve, elem, shape, order=16, singular_param=None):
    """``integral_elem U(x, C(t)) shape_j(t) J(t) dt`` for one element.

    If ``singular_param`` lies inside the element (the evaluation point is
    on the curve there), the element is split at that parameter and the log
    factor is integrated with the log-weighted rule on each side; otherwise
    a plain Gauss rule is used, with doubled order when the singular point
    is within one element length of the interval.
    """
    x_point = np.asarray(x_point, dtype=float).reshape(2, 1)
    lo, hi = float(elem[0]), float(elem[1])
    h = hi - lo

    def plain(n):
        gl = gauss_legendre(n)
        ts = lo + h * gl.nodes
        fr = curve.frame(ts)
        r = np.hypot(*(fr.points - x_point))
        g = -INV_2PI * np.log(r) * fr.jacobians
        vals = _as_shape_matrix(shape, ts, 0)
        return vals @ (h * gl.weights * g)

    if singular_param is None:
        return plain(order)
    xi = float(singular_param)
    if xi <= lo - 1e-12 or xi >= hi + 1e-12:
        near = min(abs(xi - lo), abs(xi - hi)) < h
        return plain(2 * order if near else order)

    xi = min(max(xi, lo), hi)
    gl, lg = gauss_legendre(order), gauss_log(order)
    total = None
    for a, direction in ((xi - lo, -1.0), (hi - xi, 1.0)):
        if a <= 0.0:
            continue
        ts_reg = xi + direction * a * gl.nodes
        fr = curve.frame(ts_reg)
        r = np.hypot(*(fr.points - x_point))
        g = -INV_2PI * np.log(r / gl.nodes) * fr.jacobians
        part = _as_shape_matrix(shape, ts_reg, 0) @ (a * gl.weights * g)
        ts_log = xi + direction * a * lg.nodes
        fr = curve.frame(ts_log)
        g = -INV_2PI * fr.jacobians
        part = part - _as_shape_matrix(shape, ts_log, 0) @ (a * lg.weights * g)
        total = part if total is None else total + part
    return total


def double_layer_row(x_point, curve, elem, shape, order=16, singular_param=None):
    """``integral_elem (dU/dn_y)(x, C(t)) shape_j(t) J(t) dt`` for one element.

    The kernel is bounded along a smooth curve but only one-sidedly smooth
    at an on-curve evaluation point, so the element is split there; the
    kernel value at the split point itself is the curvature limit, never
    evaluated (nodes are interior).
    """
    x_point = np.asarray(x_point, dtype=float).reshape(2, 1)
    lo, hi = float(elem[0]), float(elem[1])
    h = hi - lo

    def on_nodes(ts, weights):
        fr = curve.frame(ts)
        d = fr.points - x_point
        r2 = d[0] ** 2 + d[1] ** 2
        ddotn = d[0] * fr.normals[0] + d[1] * fr.normals[1]
        g = -INV_2PI * ddotn / r2 * fr.jacobians
        return _as_shape_matrix(shape, ts, 0) @ (weights * g)

    gl = gauss_legendre(order)
    if singular_param is None or not lo < singular_param < hi:
        near = singular_param is not None and (
            min(abs(singular_param - lo), abs(singular_param - hi)) < h
        )
        rule = gauss_legendre(2 * order) if near else gl
        return on_nodes(lo + h * rule.nodes, h * rule.weights)
    xi = float(singular_param)
    total = None
    for a, b in ((lo, xi), (xi, hi)):
        part = on_nodes(a + (b - a) * gl.nodes, (b - a) * gl.weights)
        total = part if total is None else total + part
    return total


def single_layer_potential(
    x_point, curve, mesh, density, order=16, singular_param=None, near_param=None
):
    """Single layer potential of a known density at one target point.

    ``singular_param`` marks an on-curve target (log singularity at that
    parameter); ``near_param`` marks an off-curve target close to the curve
    at that parameter, handled by geometric subdivision of the elements
    around it.
    """
    x_point = np.asarray(x_point, dtype=float)
    total = 0.0
    for i in range(mesh.n_elements):
        elem = mesh.element(i)
        if near_param is not None and elem[0] - mesh.h <= near_param <= elem[1] + mesh.h:
            total += _subdivided_single_layer(x_point, curve, elem, density, order, near_param)
        else:
            total += float(
                single_layer_row(x_point, curve, elem, density, order, singular_param)[0]
            )
    return total


def _subdivided_single_layer(x_point, curve, elem, density, order, near_param, levels=10):
    """Composite Gauss with panels graded geometrically toward ``near_param``."""
    lo, hi = elem
    pivot = min(max(near_param, lo), hi)
    cuts = {lo, hi}
    for side, end in ((lo, pivot), (hi, pivot)):
        span = end - side
        for k in range(1, levels):
            cuts.add(end - span * 0.5**k)
    cuts.add(pivot)
    edges = np.array(sorted(cuts))
    total = 0.0
    gl = gauss_legendre(order)
    xcol = x_point.reshape(2, 1)
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 0:
            continue
        ts = a + (b - a) * gl.nodes
        fr = curve.frame(ts)
        r = np.hypot(*(fr.points - xcol))
        g = -INV_2PI * np.log(r) * fr.jacobians
        vals = _as_shape_matrix(density, ts, 0)
        total += float(vals[0] @ ((b - a) * gl.weights * g))
    return total
