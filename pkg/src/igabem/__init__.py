"""2D Laplace boundary element solvers on B-spline and Lagrangian spaces.

Symmetric Galerkin discretizations of the first-kind boundary integral
system for interior, multi-curve and open-arc potential problems, plus a
Greville collocation variant.  Geometry and (optionally) the unknowns are
represented in B-form.
"""

from igabem.assembly import (
    BoundaryPart,
    BvpProblem,
    FluxDatum,
    ParamDatum,
    PointwiseDatum,
    QuadratureConfig,
    SingleLayerDatum,
    assemble_collocation,
    assemble_system,
    solve_collocation,
    solve_symmetric,
    spectral_condition,
)
from igabem.experiments import ExperimentSpec, run_builtin, run_problem
from igabem.geometry import BsplineCurve, induced_mesh, polygonal_boundary
from igabem.postprocess import (
    BoundarySolution,
    convergence_orders,
    interior_value,
    max_error,
    max_error_at_nodes,
    relative_l2_error,
)
from igabem.spaces import bspline_space, constrain_endpoints, lagrange_space, polygonal_space
from igabem.splines import SplineSpace, elevate_degree, evaluate, insert_knot

__all__ = [
    "BoundaryPart",
    "BoundarySolution",
    "BsplineCurve",
    "BvpProblem",
    "ExperimentSpec",
    "FluxDatum",
    "ParamDatum",
    "PointwiseDatum",
    "QuadratureConfig",
    "SingleLayerDatum",
    "SplineSpace",
    "assemble_collocation",
    "assemble_system",
    "bspline_space",
    "constrain_endpoints",
    "convergence_orders",
    "elevate_degree",
    "evaluate",
    "induced_mesh",
    "insert_knot",
    "interior_value",
    "lagrange_space",
    "max_error",
    "max_error_at_nodes",
    "polygonal_boundary",
    "polygonal_space",
    "relative_l2_error",
    "run_builtin",
    "run_problem",
    "solve_collocation",
    "solve_symmetric",
    "spectral_condition",
]
__version__ = "0.1.0"
