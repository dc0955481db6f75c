"""Fundamental solution of the 2D Laplacian and its layer-potential kernels.

All kernels are purely geometric: parametric jacobians are applied at the
quadrature layer.  The hypersingular kernel is never evaluated pointwise;
its Galerkin bilinear form is integrated by parts into tangential
derivatives against the weakly singular kernel (see ``igabem.quadrature``),
valid on closed curves and on functions vanishing at open-arc interface
endpoints.  Note the sign: the finite part of ``d^2 U / dn_x dn_y`` equals
MINUS that tangential form (on the unit circle its Fourier symbol is
``-n/2``); system assembly applies the sign, the quadrature layer computes
the positive tangential form itself.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

INV_2PI = 1.0 / (2.0 * np.pi)


class KernelKind(Enum):
    """Layer-potential kernels of the Laplace Calderon system."""

    SINGLE_LAYER = "V"
    DOUBLE_LAYER = "K"
    ADJOINT_DOUBLE_LAYER = "K'"
    HYPERSINGULAR = "D"


class SingularEvaluation(ValueError):
    """Kernel requested at coincident points; route through singular quadrature."""


def _dist(x, y):
    d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    return d, np.hypot(d[0], d[1])


def fundamental_solution(x, y):
    """``-(1/2 pi) ln |y - x|``; ``x`` and ``y`` are points or (2, n) batches."""
    _, r = _dist(x, y)
    if np.any(r == 0.0):
        raise SingularEvaluation("fundamental solution evaluated at coincident points")
    return -INV_2PI * np.log(r)


def double_layer_kernel(x, y, n_y):
    """Normal derivative at the integration point: ``-(1/2 pi) (y-x).n_y / r^2``."""
    d, r = _dist(x, y)
    if np.any(r == 0.0):
        raise SingularEvaluation("double layer kernel evaluated at coincident points")
    n_y = np.asarray(n_y, dtype=float)
    return -INV_2PI * (d[0] * n_y[0] + d[1] * n_y[1]) / r**2


def adjoint_double_layer_kernel(x, y, n_x):
    """Normal derivative at the evaluation point: ``+(1/2 pi) (y-x).n_x / r^2``."""
    d, r = _dist(x, y)
    if np.any(r == 0.0):
        raise SingularEvaluation("adjoint double layer kernel at coincident points")
    n_x = np.asarray(n_x, dtype=float)
    return INV_2PI * (d[0] * n_x[0] + d[1] * n_x[1]) / r**2


def coincident_limit_double_layer(curve, t):
    """Limit of the double layer kernel along the curve: ``-kappa(t) / (4 pi)``.

    Requires two continuous derivatives at ``t``; corner parameters (where
    the tangent jumps) are rejected because the limit does not exist there.
    """
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    kap_r = curve.curvature(ts, side="right")
    kap_l = curve.curvature(ts, side="left")
    if np.any(np.abs(kap_r - kap_l) > 1e-8 * (1.0 + np.abs(kap_r))):
        raise SingularEvaluation("coincident double layer limit at a corner parameter")
    out = -kap_r / (4.0 * np.pi)
    return float(out[0]) if np.isscalar(t) else out
