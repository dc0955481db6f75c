"""Galerkin assembly and solution of the first-kind boundary integral system.

For a mixed problem with Dirichlet data ``u*`` on the boundary part(s)
``G1`` and Neumann data ``q*`` on ``G2``, the unknowns are the flux ``q``
on ``G1`` and the trace ``u`` on ``G2``, coupled by the symmetric system

    [[ V_11, -K_12 ],   [[ q ],     [[ -V_12, 1/2 I + K_11 ],   [[ q* ],
     [ -K'_21, D_22 ]]   [ u ]]  =   [ -1/2 I + K'_22, -D_21 ]]  [ u* ]]

where subscripts j,k mean evaluation over part j and integration over part
k.  Pure Dirichlet problems keep only the first row; the Dirichlet problem
exterior to an open arc reduces to ``V [q] = u*`` for the flux jump.

Data functions are represented in a discrete space on their part before the
right-hand side operators are applied, except for data prescribed as a
single layer potential of a known density, which is integrated directly
(interpolating such data first would dominate the discretization error).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from igabem.geometry import BoundaryMesh, corner_params
from igabem.kernels import KernelKind
from igabem.quadrature import (
    PairClass,
    PairGeometry,
    double_layer_row,
    gauss_legendre,
    pair_geometry,
    pair_matrix,
    single_layer_potential,
    single_layer_row,
)
from igabem.spaces import DiscreteSpace


class AssemblyError(ValueError):
    """Ill-posed problem setup or failed factorization."""


# ---------------------------------------------------------------------------
# Boundary data
# ---------------------------------------------------------------------------


class PointwiseDatum:
    """Boundary datum given as a function of the physical point."""

    def __init__(self, fn):
        self.fn = fn

    def on_curve(self, curve):
        def values(ts):
            pts = curve.point(np.atleast_1d(ts))
            return np.asarray(self.fn(pts[0], pts[1]), dtype=float)

        return values


class FluxDatum:
    """Normal component of a given field gradient (Neumann datum)."""

    def __init__(self, grad_fn):
        self.grad_fn = grad_fn

    def on_curve(self, curve):
        def values(ts):
            fr = curve.frame(np.atleast_1d(ts))
            gx, gy = self.grad_fn(fr.points[0], fr.points[1])
            return gx * fr.normals[0] + gy * fr.normals[1]

        return values


class ParamDatum:
    """Boundary datum given directly as a function of the parameter."""

    def __init__(self, fn):
        self.fn = fn

    def on_curve(self, curve):
        return lambda ts: np.asarray(self.fn(np.atleast_1d(ts)), dtype=float)


class SingleLayerDatum:
    """Datum equal to the single layer potential of a known density.

    ``density`` maps curve parameters to the density value on the curve; the
    right-hand side is assembled by direct double integration against the
    test functions instead of interpolation.
    """

    def __init__(self, density):
        self.density = density

    def density_shape(self):
        return lambda ts, deriv=0: np.asarray(self.density(np.atleast_1d(ts)), dtype=float)

    def potential_on(self, curve, mesh, order=16):
        """Pointwise datum values on the carrying curve (singular integrals)."""

        def values(ts):
            ts = np.atleast_1d(np.asarray(ts, dtype=float))
            shape = self.density_shape()
            return np.array(
                [
                    single_layer_potential(
                        curve.point(np.array([t]))[:, 0], curve, mesh, shape,
                        order, singular_param=float(t),
                    )
                    for t in ts
                ]
            )

        return values


class TransplantedDatum:
    """Datum of the true boundary carried to an approximating boundary.

    Values are taken on the source curve at the same parameter, which is the
    convention of the polygonal method: the approximate boundary inherits
    the data of the curve it interpolates.
    """

    def __init__(self, base, source_curve, source_mesh, order: int = 16):
        self.base = base
        self.source_curve = source_curve
        self.source_mesh = source_mesh
        self.order = order

    def on_curve(self, curve):
        if isinstance(self.base, SingleLayerDatum):
            return self.base.potential_on(self.source_curve, self.source_mesh, self.order)
        return self.base.on_curve(self.source_curve)


# ---------------------------------------------------------------------------
# Problem description
# ---------------------------------------------------------------------------


@dataclass
class BoundaryPart:
    """One boundary curve with its role, mesh, spaces and datum.

    ``unknown_space`` hosts the unknown (flux for Dirichlet parts, trace for
    Neumann parts); ``data_space`` hosts the interpolated datum.
    """

    curve: object
    mesh: BoundaryMesh
    role: str  # "dirichlet" | "neumann"
    datum: object
    unknown_space: DiscreteSpace
    data_space: DiscreteSpace = None

    def __post_init__(self):
        if self.role not in ("dirichlet", "neumann"):
            raise AssemblyError(f"unknown part role {self.role!r}")
        if self.data_space is None and not isinstance(self.datum, SingleLayerDatum):
            self.data_space = self.unknown_space


@dataclass
class BvpProblem:
    """Boundary value problem on one or more curves.

    ``exterior_arc`` marks the Dirichlet problem exterior to a single open
    arc, whose unknown is the flux jump and whose equation is the single
    layer equation alone.
    """

    parts: list
    exterior_arc: bool = False

    def __post_init__(self):
        dirichlet = [p for p in self.parts if p.role == "dirichlet"]
        if self.exterior_arc:
            if len(self.parts) != 1 or self.parts[0].role != "dirichlet":
                raise AssemblyError("exterior arc problems are single-part Dirichlet")
            if self.parts[0].curve.closed:
                raise AssemblyError("exterior arc problems need an open curve")
        else:
            if any(p.curve.closed is False for p in self.parts):
                raise AssemblyError("interior problems need closed boundary curves")
            if not dirichlet:
                raise AssemblyError(
                    "ill-posed: the Dirichlet part must have positive measure"
                )

    @property
    def dirichlet_parts(self):
        return [p for p in self.parts if p.role == "dirichlet"]

    @property
    def neumann_parts(self):
        return [p for p in self.parts if p.role == "neumann"]


@dataclass(frozen=True)
class QuadratureConfig:
    """Base rule size with optional per-class overrides."""

    order: int = 16
    coincident: int = None
    adjacent: int = None
    disjoint: int = None

    def for_class(self, pair_class) -> int:
        from igabem.quadrature import PairClass

        override = {
            PairClass.COINCIDENT: self.coincident,
            PairClass.ADJACENT: self.adjacent,
            PairClass.DISJOINT: self.disjoint,
        }[pair_class]
        return self.order if override is None else override


# ---------------------------------------------------------------------------
# Cached geometry and shape evaluation
# ---------------------------------------------------------------------------


class _CachedCurve:
    """Frame cache keyed by the node batch; one proxy per curve and assembly."""

    def __init__(self, curve):
        self._curve = curve
        self._frames = {}
        self.a, self.b = curve.a, curve.b
        self.closed = curve.closed
        self.outward_sign = getattr(curve, "outward_sign", 1)

    def frame(self, ts, side="right"):
        key = ts.tobytes()
        hit = self._frames.get(key)
        if hit is None:
            hit = self._curve.frame(ts, side)
            self._frames[key] = hit
        return hit

    def point(self, ts, side="right"):
        return self._curve.point(ts, side)


class _ShapeCache:
    """Element shape-table cache shared across all pairs of one assembly."""

    def __init__(self):
        self._tables = {}

    def shape_fn(self, space, el):
        def fn(ts, deriv=0):
            key = (id(space), el, deriv, ts.tobytes())
            hit = self._tables.get(key)
            if hit is None:
                hit = space.element_shapes(el, ts, deriv)
                self._tables[key] = hit
            return hit

        return fn


class GalerkinAssembler:
    """Block assembler with shared frame/shape caches."""

    def __init__(self, quadrature: QuadratureConfig = QuadratureConfig()):
        if isinstance(quadrature, int):
            quadrature = QuadratureConfig(order=quadrature)
        self.quadrature = quadrature
        self._curves = {}
        self._shapes = _ShapeCache()

    def _proxy(self, curve):
        proxy = self._curves.get(id(curve))
        if proxy is None:
            proxy = _CachedCurve(curve)
            self._curves[id(curve)] = proxy
        return proxy

    def block(self, kind, part_x: BoundaryPart, part_y: BoundaryPart,
              space_x=None, space_y=None) -> np.ndarray:
        """Operator block: test functions on part_x, integration over part_y."""
        space_x = part_x.unknown_space if space_x is None else space_x
        space_y = part_y.unknown_space if space_y is None else space_y
        curve_x, curve_y = self._proxy(part_x.curve), self._proxy(part_y.curve)
        mesh_x, mesh_y = part_x.mesh, part_y.mesh
        same = part_x.curve is part_y.curve
        out = np.zeros((space_x.dof_count, space_y.dof_count))
        for i in range(mesh_x.n_elements):
            dofs_x = space_x.element_dofs(i)
            fx = self._shapes.shape_fn(space_x, i)
            for j in range(mesh_y.n_elements):
                if same:
                    pgeo = pair_geometry(mesh_x, i, j)
                else:
                    pgeo = PairGeometry.forward(
                        PairClass.DISJOINT, mesh_x.element(i), mesh_y.element(j)
                    )
                order = self.quadrature.for_class(pgeo.pair_class)
                block = pair_matrix(
                    kind, curve_x, curve_y, pgeo, fx,
                    self._shapes.shape_fn(space_y, j), order,
                )
                dofs_y = space_y.element_dofs(j)
                ax, ay = dofs_x >= 0, dofs_y >= 0
                np.add.at(
                    out,
                    (dofs_x[ax][:, None], dofs_y[ay][None, :]),
                    block[np.ix_(ax, ay)],
                )
        return out

    def mass(self, part: BoundaryPart, space_x, space_y) -> np.ndarray:
        """Arclength mass matrix between two spaces on the same mesh."""
        rule = gauss_legendre(self.quadrature.order)
        curve = self._proxy(part.curve)
        out = np.zeros((space_x.dof_count, space_y.dof_count))
        for el in range(part.mesh.n_elements):
            lo, hi = part.mesh.element(el)
            ts = lo + (hi - lo) * rule.nodes
            w = (hi - lo) * rule.weights * curve.frame(ts).jacobians
            vx = space_x.element_shapes(el, ts, 0)
            vy = space_y.element_shapes(el, ts, 0)
            dofs_x, dofs_y = space_x.element_dofs(el), space_y.element_dofs(el)
            ax, ay = dofs_x >= 0, dofs_y >= 0
            block = (vx[ax] * w) @ vy[ay].T
            np.add.at(out, (dofs_x[ax][:, None], dofs_y[ay][None, :]), block)
        return out

    def single_layer_data_rhs(self, part: BoundaryPart, density_shape) -> np.ndarray:
        """``<V density, phi_i>`` with a known density on the same curve.

        Runs through the singular pair engine, so the data term carries the
        same accuracy as the system matrix.
        """
        space_x = part.unknown_space
        out = np.zeros(space_x.dof_count)
        curve = self._proxy(part.curve)
        for i in range(part.mesh.n_elements):
            fx = self._shapes.shape_fn(space_x, i)
            dofs = space_x.element_dofs(i)
            ax = dofs >= 0
            for j in range(part.mesh.n_elements):
                pgeo = pair_geometry(part.mesh, i, j)
                order = self.quadrature.for_class(pgeo.pair_class)
                block = pair_matrix(
                    KernelKind.SINGLE_LAYER, curve, curve, pgeo, fx,
                    density_shape, order,
                )
                np.add.at(out, dofs[ax], block[ax, 0])
        return out

    def pointwise_rhs(self, part: BoundaryPart, data_values) -> np.ndarray:
        """``<u*, phi_i>`` by element Gauss rules with pointwise datum values."""
        rule = gauss_legendre(self.quadrature.order)
        space_x = part.unknown_space
        curve = self._proxy(part.curve)
        out = np.zeros(space_x.dof_count)
        for i in range(part.mesh.n_elements):
            lo, hi = part.mesh.element(i)
            ts = lo + (hi - lo) * rule.nodes
            fr = curve.frame(ts)
            w = (hi - lo) * rule.weights * fr.jacobians * np.asarray(data_values(ts))
            vx = space_x.element_shapes(i, ts, 0)
            dofs = space_x.element_dofs(i)
            ax = dofs >= 0
            np.add.at(out, dofs[ax], vx[ax] @ w)
        return out


# ---------------------------------------------------------------------------
# System assembly
# ---------------------------------------------------------------------------


@dataclass
class GalerkinSystem:
    """Assembled symmetric system with per-part unknown slices."""

    matrix: np.ndarray
    rhs: np.ndarray
    problem: BvpProblem
    slices: dict = field(repr=False, default_factory=dict)

    @property
    def order(self) -> int:
        return self.matrix.shape[0]


def _data_coefficients(part: BoundaryPart):
    if isinstance(part.datum, SingleLayerDatum):
        return None
    fn = part.datum.on_curve(part.curve)
    return part.data_space.interpolate(fn)


def _assemble_exterior_arc(problem, asm) -> GalerkinSystem:
    """Single layer equation for the flux jump of an open-arc problem."""
    part = problem.parts[0]
    matrix = asm.block(KernelKind.SINGLE_LAYER, part, part)
    if isinstance(part.datum, SingleLayerDatum):
        rhs = asm.single_layer_data_rhs(part, part.datum.density_shape())
    else:
        rhs = asm.pointwise_rhs(part, part.datum.on_curve(part.curve))
    slices = {id(part): slice(0, part.unknown_space.dof_count)}
    return GalerkinSystem(matrix, rhs, problem, slices)


def assemble_system(problem: BvpProblem, quadrature=QuadratureConfig()) -> GalerkinSystem:
    """Assemble the symmetric Galerkin system of the boundary value problem."""
    asm = GalerkinAssembler(quadrature)
    if problem.exterior_arc:
        return _assemble_exterior_arc(problem, asm)
    if any(isinstance(p.datum, SingleLayerDatum) for p in problem.parts):
        raise AssemblyError(
            "single-layer data are supported on exterior arc problems only; "
            "wrap them in TransplantedDatum for pointwise evaluation otherwise"
        )
    V, K = KernelKind.SINGLE_LAYER, KernelKind.DOUBLE_LAYER
    KP, D = KernelKind.ADJOINT_DOUBLE_LAYER, KernelKind.HYPERSINGULAR

    dir_parts = problem.dirichlet_parts
    neu_parts = problem.neumann_parts
    ordered = dir_parts + neu_parts
    slices, offset = {}, 0
    for part in ordered:
        n = part.unknown_space.dof_count
        slices[id(part)] = slice(offset, offset + n)
        offset += n
    matrix = np.zeros((offset, offset))
    rhs = np.zeros(offset)

    data = {id(p): _data_coefficients(p) for p in problem.parts}

    for px in dir_parts:
        sx = slices[id(px)]
        for py in dir_parts:
            matrix[sx, slices[id(py)]] = asm.block(V, px, py)
        for py in neu_parts:
            matrix[sx, slices[id(py)]] = -asm.block(K, px, py)
    for px in neu_parts:
        sx = slices[id(px)]
        for py in dir_parts:
            matrix[sx, slices[id(py)]] = -asm.block(KP, px, py)
        for py in neu_parts:
            # The hypersingular operator of the first-kind system equals the
            # NEGATIVE of the tangential-derivative (single layer) form: on
            # the unit circle its symbol is -n/2, not +n/2.
            matrix[sx, slices[id(py)]] = -asm.block(D, px, py)

    # Right-hand side: data operators of the first-kind system.
    for px in dir_parts:
        sx = slices[id(px)]
        c = data[id(px)]
        half_m = 0.5 * asm.mass(px, px.unknown_space, px.data_space)
        rhs[sx] += half_m @ c
        for py in dir_parts:
            cy = data[id(py)]
            if cy is None or not np.any(cy):
                continue
            rhs[sx] += asm.block(K, px, py, space_y=py.data_space) @ cy
        for py in neu_parts:
            cy = data[id(py)]
            if cy is None or not np.any(cy):
                continue
            rhs[sx] -= asm.block(V, px, py, space_y=py.data_space) @ cy
    for px in neu_parts:
        sx = slices[id(px)]
        c = data[id(px)]
        if np.any(c):
            rhs[sx] -= 0.5 * asm.mass(px, px.unknown_space, px.data_space) @ c
        for py in neu_parts:
            cy = data[id(py)]
            if np.any(cy):
                rhs[sx] += asm.block(KP, px, py, space_y=py.data_space) @ cy
        for py in dir_parts:
            cy = data[id(py)]
            if cy is None or not np.any(cy):
                continue
            # -D21 u* with D = -(tangential-derivative form).
            rhs[sx] += asm.block(D, px, py, space_y=py.data_space) @ cy

    return GalerkinSystem(matrix, rhs, problem, slices)


def solve_symmetric(system: GalerkinSystem) -> dict:
    """Solve with a symmetric indefinite factorization; residual-checked."""
    sym_defect = np.linalg.norm(system.matrix - system.matrix.T) / max(
        np.linalg.norm(system.matrix), 1e-300
    )
    if sym_defect > 1e-10:
        raise AssemblyError(f"system matrix is not symmetric (defect {sym_defect:.2e})")
    try:
        sol = scipy.linalg.solve(system.matrix, system.rhs, assume_a="sym")
    except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise AssemblyError(f"symmetric factorization failed: {exc}") from exc
    residual = np.linalg.norm(system.matrix @ sol - system.rhs)
    scale = max(np.linalg.norm(system.rhs), 1e-300)
    if residual / scale > 1e-10:
        raise AssemblyError(f"solver residual too large: {residual / scale:.2e}")
    ordered = system.problem.dirichlet_parts + system.problem.neumann_parts
    return {id(part): sol[system.slices[id(part)]] for part in ordered}


def spectral_condition(matrix: np.ndarray, symmetric: bool = True) -> float:
    """Ratio of extreme |eigenvalues| (symmetric) or singular values."""
    if symmetric:
        eig = np.abs(np.linalg.eigvalsh(matrix))
    else:
        eig = scipy.linalg.svdvals(matrix)
    if eig.min() == 0.0:
        return np.inf
    return float(eig.max() / eig.min())


# ---------------------------------------------------------------------------
# Greville collocation variant (Dirichlet problems)
# ---------------------------------------------------------------------------


def assemble_collocation(problem: BvpProblem, quadrature=QuadratureConfig()):
    """Square collocation system at the Greville abscissae of the flux space.

    Only for single-part Dirichlet problems with a B-spline unknown space.
    Exterior-arc problems collocate ``V q = u*``; interior problems
    collocate the first identity ``V q = (1/2 I + K) u*`` with the datum
    represented in the data space.  Returns (matrix, rhs, params).
    """
    if isinstance(quadrature, int):
        quadrature = QuadratureConfig(order=quadrature)
    if problem.neumann_parts or len(problem.parts) != 1:
        raise AssemblyError("collocation supports single-part Dirichlet problems")
    part = problem.parts[0]
    space = part.unknown_space
    if not hasattr(space, "space"):
        raise AssemblyError("collocation needs a B-spline unknown space")
    gamma = space.space.greville()
    corners = corner_params(part.curve)
    if corners.size and np.min(np.abs(gamma[:, None] - corners[None, :])) < 1e-12:
        raise AssemblyError("collocation point coincides with a boundary corner")
    if space.dof_count != gamma.size:
        gamma = gamma[: space.dof_count]

    order = quadrature.order
    n = space.dof_count
    matrix = np.zeros((n, n))
    rhs = np.zeros(n)
    x_pts = part.curve.point(gamma)
    datum = part.datum
    density = datum.density_shape() if isinstance(datum, SingleLayerDatum) else None
    if density is None:
        data_fn = datum.on_curve(part.curve)
        data_coeffs = None if problem.exterior_arc else part.data_space.interpolate(data_fn)
    for i in range(n):
        x = x_pts[:, i]
        for el in range(part.mesh.n_elements):
            row = single_layer_row(
                x, part.curve, part.mesh.element(el), space.shape_fn(el),
                order, singular_param=float(gamma[i]),
            )
            dofs = space.element_dofs(el)
            ax = dofs >= 0
            np.add.at(matrix, (np.full(ax.sum(), i), dofs[ax]), row[ax])
        if density is not None:
            rhs[i] = single_layer_potential(
                x, part.curve, part.mesh, density, order, singular_param=float(gamma[i])
            )
        elif problem.exterior_arc:
            rhs[i] = float(data_fn(np.array([gamma[i]]))[0])
        else:
            rhs[i] = 0.5 * float(data_fn(np.array([gamma[i]]))[0])
            for el in range(part.mesh.n_elements):
                row = double_layer_row(
                    x, part.curve, part.mesh.element(el), part.data_space.shape_fn(el),
                    order, singular_param=float(gamma[i]),
                )
                dofs = part.data_space.element_dofs(el)
                ax = dofs >= 0
                rhs[i] += float(row[ax] @ data_coeffs[dofs[ax]])
    return matrix, rhs, gamma


def solve_collocation(matrix, rhs):
    sol = scipy.linalg.solve(matrix, rhs)
    residual = np.linalg.norm(matrix @ sol - rhs) / max(np.linalg.norm(rhs), 1e-300)
    if residual > 1e-10:
        raise AssemblyError(f"collocation solver residual too large: {residual:.2e}")
    return sol
