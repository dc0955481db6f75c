"""Discrete approximation spaces on boundary meshes.

Three families share one element-wise interface (global DoF indices plus
local shape evaluation with parameter derivatives):

* B-spline spaces: the basis of an open-knot spline space whose breakpoint
  intervals coincide with the mesh; on closed curves the first and last
  basis functions may be identified when the modeled unknown is continuous
  across the closure;
* Lagrangian spaces on the curvilinear mesh: uniform interpolation nodes
  per element, shared across continuous junctions and duplicated across
  discontinuous ones (periodically for closed curves);
* the same Lagrangian construction, fully discontinuous, on a polygonal
  boundary (the polygon replaces the curve in all integrals).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from igabem.geometry import BoundaryMesh, PolygonalBoundary, induced_mesh
from igabem.splines import SplineSpace


class SpaceError(ValueError):
    """Inconsistent mesh/space combination or invalid continuity request."""


class DiscreteSpace:
    """Element-wise view of a global basis.

    Subclasses define ``dof_count``, ``element_dofs`` (global indices per
    element, ``-1`` marking a constrained-away function) and
    ``element_shapes`` (local basis values or parameter derivatives at
    parameter batches inside one element).
    """

    mesh: BoundaryMesh
    dof_count: int

    def element_dofs(self, el: int) -> np.ndarray:
        raise NotImplementedError

    def element_shapes(self, el: int, ts, deriv: int = 0) -> np.ndarray:
        raise NotImplementedError

    def shape_fn(self, el: int):
        """Shape callable of one element for the pair-integration engine."""
        return lambda ts, deriv=0: self.element_shapes(el, ts, deriv)

    def _locate(self, ts) -> np.ndarray:
        ends = self.mesh.elements[:, 1]
        idx = np.searchsorted(ends, ts, side="left")
        return np.clip(idx, 0, self.mesh.n_elements - 1)

    def evaluate(self, coeffs, ts) -> np.ndarray:
        """Evaluate the spanned function with the given coefficient vector."""
        coeffs = np.asarray(coeffs, dtype=float)
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        out = np.zeros(ts.size)
        elems = self._locate(ts)
        for el in np.unique(elems):
            sel = elems == el
            vals = self.element_shapes(int(el), ts[sel], 0)
            dofs = self.element_dofs(int(el))
            active = dofs >= 0
            out[sel] = coeffs[dofs[active]] @ vals[active]
        return out

    def interpolate(self, fn) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class BsplineSpace(DiscreteSpace):
    """B-spline basis over the mesh, optionally closure-identified."""

    space: SplineSpace
    mesh: BoundaryMesh
    identify_closure: bool = False

    def __post_init__(self):
        bp = self.space.breakpoints
        ends = np.concatenate([self.mesh.elements[:, 0], self.mesh.elements[-1:, 1]])
        if bp.size != ends.size or np.any(np.abs(bp - ends) > 1e-9):
            raise SpaceError("mesh elements must coincide with knot spans")
        if self.identify_closure and not getattr(self.mesh.curve, "closed", False):
            raise SpaceError("closure identification needs a closed curve")

    @property
    def dof_count(self) -> int:
        return self.space.dimension - (1 if self.identify_closure else 0)

    def _map_dof(self, raw: np.ndarray) -> np.ndarray:
        if not self.identify_closure:
            return raw
        return np.where(raw == self.space.dimension - 1, 0, raw)

    def element_dofs(self, el: int) -> np.ndarray:
        lo, hi = self.mesh.element(el)
        mu = self.space.find_span(0.5 * (lo + hi))
        raw = np.arange(mu - self.space.degree, mu + 1)
        return self._map_dof(raw)

    def element_shapes(self, el: int, ts, deriv: int = 0) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        first, ders = self.space.basis_block(ts, deriv)
        lo, _ = self.mesh.element(el)
        mu = self.space.find_span(0.5 * (lo + self.mesh.element(el)[1]))
        if first != mu - self.space.degree:
            raise SpaceError("evaluation points left their element's knot span")
        return ders[deriv]

    def expand_coefficients(self, coeffs) -> np.ndarray:
        """Raw B-form coefficients (duplicating the identified closure DoF)."""
        coeffs = np.asarray(coeffs, dtype=float)
        if not self.identify_closure:
            return coeffs
        return np.concatenate([coeffs, coeffs[:1]])

    def evaluate(self, coeffs, ts) -> np.ndarray:
        from igabem.splines import evaluate as spline_eval

        return spline_eval(self.space, self.expand_coefficients(coeffs), ts, 0)[0]

    def interpolate(self, fn) -> np.ndarray:
        """Greville interpolation of a continuous function of the parameter."""
        from igabem.splines import greville_collocation

        pts, sides, mat = greville_collocation(self.space)
        if self.identify_closure:
            mat = mat[:-1].copy()
            mat[:, 0] += mat[:, -1]
            mat = mat[:, :-1]
            pts = pts[:-1]
        vals = np.asarray(fn(np.asarray(pts)), dtype=float)
        return np.linalg.solve(mat, vals)


def bspline_space(space: SplineSpace, mesh: BoundaryMesh, identify_closure=False):
    return BsplineSpace(space, mesh, identify_closure)


def _lagrange_coefficient_matrix(degree: int):
    """Power-basis coefficients of the Lagrange basis at uniform nodes."""
    nodes = np.array([0.5]) if degree == 0 else np.linspace(0.0, 1.0, degree + 1)
    vander = np.vander(nodes, increasing=True)
    return np.linalg.inv(vander), nodes


class LagrangeSpace(DiscreteSpace):
    """Lagrangian basis at uniform nodes, C0 or broken across junctions.

    Parameters
    ----------
    mesh : BoundaryMesh
        Mesh of the curve (or polygon) the basis lives on.
    degree : int
        Local polynomial degree; ``0`` gives piecewise constants.
    discontinuous_at : iterable of float
        Junction parameters where the basis is allowed to jump.  For closed
        curves the closure junction is addressed by the domain start value.
    fully_discontinuous : bool
        Break every junction (independent nodes per element).
    """

    def __init__(self, mesh, degree, discontinuous_at=(), fully_discontinuous=False):
        if degree < 0:
            raise SpaceError("degree must be >= 0")
        self.mesh = mesh
        self.degree = degree
        self.closed = bool(getattr(mesh.curve, "closed", False))
        coeff, nodes = _lagrange_coefficient_matrix(degree)
        self._coeff = coeff
        self._nodes = nodes
        self._numbering = self._number_dofs(fully_discontinuous, discontinuous_at)

    def _junction_broken(self, param, discontinuous_at):
        return any(abs(param - p) <= 1e-9 for p in discontinuous_at)

    def _number_dofs(self, fully_discontinuous, discontinuous_at):
        n, d = self.mesh.n_elements, self.degree
        ids = -np.ones((n, d + 1), dtype=int)
        counter = 0
        sharing = d >= 1 and not fully_discontinuous
        for el in range(n):
            lo, _ = self.mesh.element(el)
            for loc in range(d + 1):
                if (
                    loc == 0
                    and el > 0
                    and sharing
                    and not self._junction_broken(lo, discontinuous_at)
                ):
                    ids[el, 0] = ids[el - 1, d]
                    continue
                ids[el, loc] = counter
                counter += 1
        if (
            self.closed
            and sharing
            and not self._junction_broken(self.mesh.element(0)[0], discontinuous_at)
        ):
            old = ids[n - 1, d]
            ids[ids == old] = ids[0, 0]
            ids[ids > old] -= 1
            counter -= 1
        self._dof_count = counter
        return ids

    @property
    def dof_count(self) -> int:
        return self._dof_count

    def element_dofs(self, el: int) -> np.ndarray:
        return self._numbering[el]

    def element_shapes(self, el: int, ts, deriv: int = 0) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        lo, hi = self.mesh.element(el)
        x = (ts - lo) / (hi - lo)
        powers = np.vander(x, self.degree + 1, increasing=True).T
        if deriv == 0:
            return self._coeff.T @ powers
        dcoeff = self._coeff[1:] * np.arange(1, self.degree + 1)[:, None]
        dpow = powers[: self.degree]
        return (dcoeff.T @ dpow) / (hi - lo) if self.degree else np.zeros((1, ts.size))

    def node_params(self) -> np.ndarray:
        """One representative parameter per global DoF."""
        params = np.zeros(self.dof_count)
        for el in range(self.mesh.n_elements):
            lo, hi = self.mesh.element(el)
            for loc, dof in enumerate(self._numbering[el]):
                if dof >= 0:
                    params[dof] = lo + (hi - lo) * self._nodes[loc]
        return params

    def interpolate(self, fn) -> np.ndarray:
        return np.asarray(fn(self.node_params()), dtype=float)


def lagrange_space(mesh, degree, discontinuous_at=(), fully_discontinuous=False):
    return LagrangeSpace(mesh, degree, discontinuous_at, fully_discontinuous)


def polygonal_space(poly: PolygonalBoundary, degree: int):
    """Fully discontinuous Lagrangian space on a polygonal boundary."""
    mesh = induced_mesh(poly, poly.n_segments)
    return LagrangeSpace(mesh, degree, fully_discontinuous=True), mesh


class ConstrainedSpace(DiscreteSpace):
    """Subspace of functions vanishing at given interface parameters."""

    def __init__(self, base: DiscreteSpace, interface_params):
        self.base = base
        self.mesh = base.mesh
        dropped = set()
        for p in interface_params:
            for side in ("left", "right"):
                for el in range(base.mesh.n_elements):
                    lo, hi = base.mesh.element(el)
                    if not (lo - 1e-12 <= p <= hi + 1e-12):
                        continue
                    probe = np.array([min(max(p, lo), hi)])
                    vals = base.element_shapes(el, probe, 0)[:, 0]
                    dofs = base.element_dofs(el)
                    dropped.update(int(d) for d, v in zip(dofs, vals) if d >= 0 and abs(v) > 1e-12)
        keep = [d for d in range(base.dof_count) if d not in dropped]
        self._old_to_new = -np.ones(base.dof_count, dtype=int)
        self._old_to_new[keep] = np.arange(len(keep))
        self._dof_count = len(keep)

    @property
    def dof_count(self) -> int:
        return self._dof_count

    def element_dofs(self, el: int) -> np.ndarray:
        raw = self.base.element_dofs(el)
        out = raw.copy()
        active = raw >= 0
        out[active] = self._old_to_new[raw[active]]
        return out

    def element_shapes(self, el: int, ts, deriv: int = 0) -> np.ndarray:
        return self.base.element_shapes(el, ts, deriv)


def constrain_endpoints(space: DiscreteSpace, interface_params) -> ConstrainedSpace:
    """Drop every basis function that does not vanish at the given points."""
    return ConstrainedSpace(space, interface_params)
