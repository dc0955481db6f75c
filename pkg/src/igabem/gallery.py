"""Built-in boundary geometries used by the bundled experiments.

Four benchmark boundaries, all in B-form with open extended knot vectors:

1. a closed piecewise-quadratic curve with three sharp corners ("pacman"),
   available over the plain knot vector or the variant with tripled interior
   knots that admits jump discontinuities of the approximated flux;
2. a smooth closed free-form cubic;
3. two annular domains (cubic and quartic outer/inner curve pairs);
4. an open parabolic arc.

Control nets and knot vectors are fixed data of the benchmark set.  All
curves are oriented so that ``(C2', -C1')/|C'|`` with ``outward_sign = +1``
is the domain-outward normal (hole boundaries run clockwise).
"""

from __future__ import annotations

import numpy as np

from igabem.geometry import BsplineCurve
from igabem.splines import SplineSpace, insert_knot

PACMAN_KNOTS = [0, 0, 0, 1, 1, 2, 3, 4, 5, 6, 7, 8, 8, 9, 9, 9]
PACMAN_KNOTS_JUMPY = [0, 0, 0, 1, 1, 1, 2, 3, 4, 5, 6, 7, 8, 8, 8, 9, 9, 9]

_PACMAN_Q = np.array(
    [
        [0, 0.5, 1, 1, 0, -1, -1, -1, 0, 1, 1, 0.5, 0],
        [0, 0.125, 0.25, 1, 1, 1, 0, -1, -1, -1, -0.25, -0.125, 0],
    ]
).T

_FREEFORM_KNOTS = [0, 0, 0, 0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1, 1, 1, 1]
_FREEFORM_Q = np.array(
    [
        [-16, -22, -1, 2, 29, 1, 32, 12, 4, -10, -16],
        [11.5, 6.5, 2, -15, -8, -4, 17, 19, 1, 16.5, 11.5],
    ]
).T

_ANNULUS_A_KNOTS = [0, 0, 0, 0, 1 / 6, 2 / 6, 3 / 6, 4 / 6, 5 / 6, 1, 1, 1, 1]
_ANNULUS_B_KNOTS = [0, 0, 0, 0, 0, 1 / 5, 2 / 5, 3 / 5, 4 / 5, 1, 1, 1, 1, 1]

_ANNULUS_OUTER_Q = np.array(
    [
        [1, 1, 0, -1, -1, -1, 0, 1, 1],
        [0, 1, 1, 1, 0, -1, -1, -1, 0],
    ]
).T
_ANNULUS_A_INNER_Q = np.array(
    [
        [0.25, 0.25, -0.25, -0.75, -0.75, -0.75, -0.25, 0.25, 0.25],
        [0.25, -0.25, -0.25, -0.25, 0.25, 0.75, 0.75, 0.75, 0.25],
    ]
).T
_ANNULUS_B_INNER_Q = np.array(
    [
        [-0.25, -0.25, -0.5, -0.75, -0.75, -0.75, -0.5, -0.25, -0.25],
        [0.5, 0.25, 0.25, 0.25, 0.5, 0.75, 0.75, 0.75, 0.5],
    ]
).T

_ARC_KNOTS = [-1, -1, -1, 1, 1, 1]
_ARC_Q = np.array([[-1, 0, 1], [0, 2, 0]]).T


def _checked(curve: BsplineCurve, closed: bool, start=None) -> BsplineCurve:
    """Startup self-check: closure flag and, when given, the seam point."""
    if curve.closed != closed:
        raise ValueError("benchmark geometry closure check failed")
    if start is not None:
        ends = curve.point(np.array([curve.a, curve.b]))
        if np.abs(ends - np.asarray(start, dtype=float)[:, None]).max() > 1e-14:
            raise ValueError("benchmark geometry endpoint check failed")
    return curve


def pacman_curve(jumpy_knots: bool = False) -> BsplineCurve:
    """Closed quadratic boundary with corners at parameters 0, 1 and 8.

    With ``jumpy_knots`` the interior corner knots are tripled, so spaces
    built on the curve's knot vector allow jumps there; the geometry is
    identical either way.
    """
    if jumpy_knots:
        space, coeffs = SplineSpace(3, PACMAN_KNOTS), _PACMAN_Q
        for t_hat in (1.0, 8.0):
            space, coeffs = insert_knot(space, coeffs, t_hat)
        return _checked(BsplineCurve(space, coeffs), True, (0.0, 0.0))
    return _checked(BsplineCurve(SplineSpace(3, PACMAN_KNOTS), _PACMAN_Q), True, (0.0, 0.0))


def freeform_curve() -> BsplineCurve:
    """Smooth closed free-form cubic on [0, 1], eight breakpoint intervals."""
    return _checked(BsplineCurve(SplineSpace(4, _FREEFORM_KNOTS), _FREEFORM_Q), True)


def annulus_curves(variant: str = "a") -> tuple[BsplineCurve, BsplineCurve]:
    """(outer, inner) boundary curves of the annular benchmark domains.

    Variant ``"a"`` uses cubics (six intervals), ``"b"`` quartics (five).
    The inner curves are parametrized clockwise, so ``outward_sign = +1``
    makes their normals point away from the annular region on both curves.
    """
    if variant == "a":
        space = SplineSpace(4, _ANNULUS_A_KNOTS)
        inner_q = _ANNULUS_A_INNER_Q
    elif variant == "b":
        space = SplineSpace(5, _ANNULUS_B_KNOTS)
        inner_q = _ANNULUS_B_INNER_Q
    else:
        raise ValueError(f"unknown annulus variant {variant!r}")
    return (
        _checked(BsplineCurve(space, _ANNULUS_OUTER_Q), True, (1.0, 0.0)),
        _checked(BsplineCurve(space, inner_q), True),
    )


def parabola_arc() -> BsplineCurve:
    """Open quadratic arc ``(t, 1 - t^2)`` for t in [-1, 1]."""
    return _checked(BsplineCurve(SplineSpace(3, _ARC_KNOTS), _ARC_Q), False)


def quasi_circle(radius: float = 1.0, center=(0.0, 0.0)) -> BsplineCurve:
    """Closed C^1 quadratic approximation of a circle (control octagon).

    Not an exact circle (B-form here is polynomial); used where any smooth
    closed curve will do.
    """
    angles = np.linspace(0.0, 2.0 * np.pi, 9)[:-1]
    # Octagon vertices scaled so the edge midpoints land on the circle; each
    # quadratic Bezier piece (mid, vertex, mid) then joins its neighbors C^1.
    verts = np.stack([np.cos(angles), np.sin(angles)], axis=1) * (radius / np.cos(np.pi / 8))
    mids = 0.5 * (verts + np.roll(verts, -1, axis=0))
    ctrl = np.empty((17, 2))
    ctrl[0::2] = np.vstack([mids, mids[:1]])
    ctrl[1::2] = np.roll(verts, -1, axis=0)
    ctrl += np.asarray(center, dtype=float)
    space = SplineSpace.from_breakpoints(3, np.arange(9.0), 2 * np.ones(7, dtype=int))
    return BsplineCurve(space, ctrl)


def scaled(curve: BsplineCurve, factor: float) -> BsplineCurve:
    """Same curve with control points scaled about the origin."""
    return BsplineCurve(curve.space, curve.control_points * factor, curve.outward_sign)
