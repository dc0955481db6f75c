"""Polynomial spline spaces in B-form.

A space is described by its order ``k`` (degree ``k - 1``) and an open
extended knot vector ``tau_0 <= ... <= tau_{N+k}``: the first and last knot
repeat ``k`` times and each interior breakpoint ``t_i`` appears with its
multiplicity ``m_i`` (``1 <= m_i <= k``).  The space dimension is
``N + 1 = k + sum(m_i)`` and the basis is the usual B-spline basis defined
by the Cox-de Boor recursion with the 0/0 -> 0 convention.

Basis functions are right-continuous; evaluation at the right end of the
domain (or with ``side="left"``) uses left limits so that the closed
interval is usable even across discontinuity knots of multiplicity ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class SplineError(ValueError):
    """Invalid knot vector, coefficients or evaluation request."""


def _as_knot_array(knots) -> np.ndarray:
    arr = np.asarray(knots, dtype=float)
    if arr.ndim != 1:
        raise SplineError("knot vector must be one-dimensional")
    if np.any(np.diff(arr) < 0.0):
        raise SplineError("knot vector must be non-decreasing")
    return arr


@dataclass(frozen=True)
class SplineSpace:
    """Spline space of order ``k`` over an open extended knot vector.

    Parameters
    ----------
    order : int
        Order ``k >= 1`` (polynomial degree ``k - 1``).
    knots : array_like
        Extended knot vector of length ``dimension + order``, open at both
        ends (end knots repeated ``order`` times).
    """

    order: int
    knots: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "knots", _as_knot_array(self.knots))
        k, tau = self.order, self.knots
        if k < 1:
            raise SplineError(f"order must be >= 1, got {k}")
        if tau.size < 2 * k:
            raise SplineError("knot vector too short for the requested order")
        a, b = tau[k - 1], tau[-k]
        if a >= b:
            raise SplineError("empty parameter domain")
        if np.any(tau[:k] != a) or np.any(tau[-k:] != b):
            raise SplineError("knot vector must be open (end knots repeated k times)")
        _, mult = np.unique(tau[k - 1 : tau.size - k + 1], return_counts=True)
        if mult.size > 2 and np.any(mult[1:-1] > k):
            raise SplineError("interior knot multiplicity exceeds the order")

    # -- structure -----------------------------------------------------

    @property
    def degree(self) -> int:
        return self.order - 1

    @property
    def dimension(self) -> int:
        """Number of B-splines, ``N + 1 = k + sum(m_i)``."""
        return self.knots.size - self.order

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.knots[self.order - 1]), float(self.knots[-self.order])

    @property
    def breakpoints(self) -> np.ndarray:
        """Distinct knots inside the closed domain, endpoints included."""
        k = self.order
        return np.unique(self.knots[k - 1 : self.knots.size - k + 1])

    @property
    def multiplicities(self) -> np.ndarray:
        """Multiplicity of each interior breakpoint (matches breakpoints[1:-1])."""
        k = self.order
        interior = self.knots[k : self.knots.size - k]
        bp = self.breakpoints[1:-1]
        return np.array([int(np.sum(interior == t)) for t in bp], dtype=int)

    @classmethod
    def from_breakpoints(cls, order, breakpoints, multiplicities=None) -> "SplineSpace":
        """Open knot vector from breakpoints and interior multiplicities."""
        bp = np.asarray(breakpoints, dtype=float)
        if bp.size < 2 or np.any(np.diff(bp) <= 0):
            raise SplineError("breakpoints must be strictly increasing, at least two")
        if multiplicities is None:
            mult = np.ones(bp.size - 2, dtype=int)
        else:
            mult = np.asarray(multiplicities, dtype=int)
        if mult.size != bp.size - 2:
            raise SplineError("need one multiplicity per interior breakpoint")
        knots = [bp[0]] * order
        for t, m in zip(bp[1:-1], mult):
            knots.extend([t] * int(m))
        knots.extend([bp[-1]] * order)
        return cls(order, np.array(knots))

    @classmethod
    def open_uniform(cls, order, a, b, n_intervals) -> "SplineSpace":
        return cls.from_breakpoints(order, np.linspace(a, b, n_intervals + 1))

    def with_midpoints_inserted(self) -> "SplineSpace":
        """Insert the midpoint of every breakpoint interval as a simple knot."""
        bp = self.breakpoints
        mids = 0.5 * (bp[:-1] + bp[1:])
        knots = np.sort(np.concatenate([self.knots, mids]))
        return SplineSpace(self.order, knots)

    # -- evaluation ----------------------------------------------------

    def find_span(self, t: float, side: str = "right") -> int:
        """Index ``mu`` of the non-empty span with ``tau_mu <= t < tau_{mu+1}``.

        ``side="left"`` resolves knots by left limit (span ending at ``t``);
        it is also applied automatically at the right end of the domain.
        """
        a, b = self.domain
        if t < a or t > b:
            raise SplineError(f"parameter {t} outside domain [{a}, {b}]")
        tau = self.knots
        if side == "left" and t > a or t == b:
            mu = int(np.searchsorted(tau, t, side="left")) - 1
        else:
            mu = int(np.searchsorted(tau, t, side="right")) - 1
        return mu

    def eval_basis(self, t: float, deriv_order: int = 0, side: str = "right"):
        """All B-splines that may be nonzero at ``t`` with derivatives.

        Returns
        -------
        first_index : int
            Index of the first returned basis function; the returned block
            covers ``B_{first_index}, ..., B_{first_index + order - 1}``.
        values : ndarray, shape (deriv_order + 1, order)
            ``values[r, j]`` is the r-th derivative of basis function
            ``first_index + j`` at ``t``.
        """
        mu = self.find_span(t, side=side)
        values = self._basis_on_span(mu, np.array([t]), deriv_order)[:, :, 0]
        return mu - self.degree, values

    def _basis_on_span(self, mu: int, ts: np.ndarray, nderiv: int) -> np.ndarray:
        """Vectorized basis table on one span: shape (nderiv+1, order, npts).

        Standard triangular Cox-de Boor scheme plus the derivative
        recurrence; all ``ts`` must lie in ``[tau_mu, tau_{mu+1}]`` with the
        span non-empty, which keeps every divisor positive.
        """
        p = self.degree
        tau = self.knots
        npts = ts.size
        ndu = np.zeros((p + 1, p + 1, npts))
        ndu[0, 0] = 1.0
        left = np.empty((p + 1, npts))
        right = np.empty((p + 1, npts))
        for j in range(1, p + 1):
            left[j] = ts - tau[mu + 1 - j]
            right[j] = tau[mu + j] - ts
            saved = np.zeros(npts)
            for r in range(j):
                ndu[j, r] = right[r + 1] + left[j - r]
                temp = ndu[r, j - 1] / ndu[j, r]
                ndu[r, j] = saved + right[r + 1] * temp
                saved = left[j - r] * temp
            ndu[j, j] = saved

        n = min(nderiv, p)
        ders = np.zeros((nderiv + 1, p + 1, npts))
        ders[0] = ndu[:, p]
        a = np.zeros((2, p + 1, npts))
        for j in range(p + 1):
            s1, s2 = 0, 1
            a[:] = 0.0
            a[0, 0] = 1.0
            for r in range(1, n + 1):
                d = np.zeros(npts)
                rk, pk = j - r, p - r
                if j >= r:
                    a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                    d = a[s2, 0] * ndu[rk, pk]
                j1 = 1 if rk >= -1 else -rk
                j2 = r - 1 if j - 1 <= pk else p - j
                for i in range(j1, j2 + 1):
                    a[s2, i] = (a[s1, i] - a[s1, i - 1]) / ndu[pk + 1, rk + i]
                    d = d + a[s2, i] * ndu[rk + i, pk]
                if j <= pk:
                    a[s2, r] = -a[s1, r - 1] / ndu[pk + 1, j]
                    d = d + a[s2, r] * ndu[j, pk]
                ders[r, j] = d
                s1, s2 = s2, s1

        fact = float(p)
        for r in range(1, n + 1):
            ders[r] *= fact
            fact *= p - r
        return ders

    def basis_block(self, ts: np.ndarray, nderiv: int = 0, side: str = "right"):
        """Basis table for points that all live in one span.

        Returns ``(first_index, ders)`` with ``ders`` of shape
        ``(nderiv + 1, order, npts)``.  All points must fall in the same
        non-empty knot span (e.g. quadrature nodes of one element).
        """
        ts = np.asarray(ts, dtype=float)
        mu = self.find_span(float(ts[0]), side=side)
        lo, hi = self.knots[mu], self.knots[mu + 1]
        if np.any(ts < lo - 1e-12) or np.any(ts > hi + 1e-12):
            raise SplineError("basis_block points must share one knot span")
        return mu - self.degree, self._basis_on_span(mu, ts, nderiv)

    def greville(self) -> np.ndarray:
        """Knot averages ``(tau_{i+1} + ... + tau_{i+k-1}) / (k - 1)``."""
        if self.order < 2:
            raise SplineError("Greville abscissae need order >= 2")
        tau = self.knots
        p = self.degree
        out = np.array([tau[i + 1 : i + p + 1].mean() for i in range(self.dimension)])
        return out


def evaluate(space: SplineSpace, coeffs, ts, nderiv: int = 0, side: str = "right"):
    """Evaluate a spline (or curve) given its B-form coefficients.

    ``coeffs`` has shape ``(dimension,)`` or ``(dimension, m)``.  Returns an
    array of shape ``(nderiv + 1, npts)`` or ``(nderiv + 1, npts, m)``.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[0] != space.dimension:
        raise SplineError("coefficient count does not match space dimension")
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    out_shape = (nderiv + 1, ts.size) + coeffs.shape[1:]
    out = np.zeros(out_shape)
    # Group points by knot span so each group vectorizes.
    spans = np.array([space.find_span(float(t), side=side) for t in ts])
    for mu in np.unique(spans):
        sel = spans == mu
        ders = space._basis_on_span(int(mu), ts[sel], nderiv)
        first = int(mu) - space.degree
        block = coeffs[first : first + space.order]
        out[:, sel] = np.einsum("djp,j...->dp...", ders, block)
    return out


def insert_knot(space: SplineSpace, coeffs, t_hat: float):
    """Insert one knot at ``t_hat`` keeping the represented function fixed.

    Boehm's algorithm.  ``t_hat`` must be interior to the domain and the
    resulting multiplicity must not exceed the order.
    """
    a, b = space.domain
    if not a < t_hat < b:
        raise SplineError("knot insertion point must be interior to the domain")
    tau, k, p = space.knots, space.order, space.degree
    if int(np.sum(tau == t_hat)) >= k:
        raise SplineError("knot insertion would exceed multiplicity = order")
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[0] != space.dimension:
        raise SplineError("coefficient count does not match space dimension")
    mu = space.find_span(t_hat)
    new_tau = np.insert(tau, mu + 1, t_hat)
    new = np.empty((coeffs.shape[0] + 1,) + coeffs.shape[1:])
    new[: mu - p + 1] = coeffs[: mu - p + 1]
    for i in range(mu - p + 1, mu + 1):
        alpha = (t_hat - tau[i]) / (tau[i + p] - tau[i])
        new[i] = (1.0 - alpha) * coeffs[i - 1] + alpha * coeffs[i]
    new[mu + 1 :] = coeffs[mu:]
    return SplineSpace(k, new_tau), new


def refine_midpoints(space: SplineSpace, coeffs):
    """Insert the midpoint of every breakpoint interval as a simple knot."""
    bp = space.breakpoints
    out_space, out_coeffs = space, np.asarray(coeffs, dtype=float)
    for t_hat in 0.5 * (bp[:-1] + bp[1:]):
        out_space, out_coeffs = insert_knot(out_space, out_coeffs, float(t_hat))
    return out_space, out_coeffs


def greville_collocation(space: SplineSpace):
    """Greville interpolation data: points, evaluation sides and matrix.

    At a discontinuity knot (interior multiplicity equal to the order) two
    Greville abscissae coincide; the first is resolved by left limit and the
    second by right limit so the collocation matrix stays nonsingular.
    """
    pts = space.greville()
    sides = ["right"] * pts.size
    for i in range(1, pts.size):
        if pts[i] == pts[i - 1]:
            sides[i - 1] = "left"
    a, b = space.domain
    mat = np.zeros((pts.size, space.dimension))
    for i, (t, side) in enumerate(zip(pts, sides)):
        first, vals = space.eval_basis(float(t), 0, side=side)
        mat[i, first : first + space.order] = vals[0]
    return pts, sides, mat


def interpolate_at_greville(space: SplineSpace, fn):
    """B-form coefficients interpolating ``fn(params)`` at Greville points."""
    pts, _, mat = greville_collocation(space)
    vals = np.asarray(fn(pts), dtype=float)
    if vals.shape[0] != pts.size:
        vals = vals.T
    return np.linalg.solve(mat, vals)


def elevate_degree(space: SplineSpace, coeffs):
    """Re-represent the same function with order raised by one.

    Every breakpoint multiplicity is incremented, so all continuity classes
    are preserved.  Coefficients in the elevated space are recovered by
    Greville interpolation, which is exact for functions of the space.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    bp = space.breakpoints
    mult = space.multiplicities
    target = SplineSpace.from_breakpoints(space.order + 1, bp, mult + 1)
    pts, sides, mat = greville_collocation(target)
    vals = np.empty((pts.size,) + coeffs.shape[1:])
    for i, (t, side) in enumerate(zip(pts, sides)):
        vals[i] = evaluate(space, coeffs, [float(t)], 0, side=side)[0, 0]
    return target, np.linalg.solve(mat, vals.reshape(pts.size, -1)).reshape(
        (target.dimension,) + coeffs.shape[1:]
    )
