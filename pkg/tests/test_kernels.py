"""Kernel values, symmetry, harmonicity and coincident limits."""

import numpy as np
import pytest

from igabem.geometry import BsplineCurve, unit_circle
from igabem.kernels import (
    SingularEvaluation,
    adjoint_double_layer_kernel,
    coincident_limit_double_layer,
    double_layer_kernel,
    fundamental_solution,
)
from igabem.splines import SplineSpace


class TestFundamentalSolution:
    def test_zero_at_unit_distance(self):
        assert fundamental_solution([0, 0], [1, 0]) == 0.0

    def test_value_at_distance_e(self):
        got = fundamental_solution([0.0, 0.0], [np.e, 0.0])
        assert got == pytest.approx(-1 / (2 * np.pi), abs=1e-15)

    def test_symmetry_random_pairs(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            x, y = rng.standard_normal(2), rng.standard_normal(2)
            assert fundamental_solution(x, y) == fundamental_solution(y, x)

    def test_coincident_rejected(self):
        with pytest.raises(SingularEvaluation):
            fundamental_solution([1.0, 2.0], [1.0, 2.0])

    def test_harmonic_in_x(self):
        # Five-point Laplacian stencil away from the singularity.
        y = np.array([0.3, -0.2])
        delta = 1e-3
        for x in ([1.5, 0.4], [-0.7, 1.1], [0.0, 2.0]):
            x = np.array(x)
            u = fundamental_solution(x, y)
            lap = -4 * u
            for off in ([delta, 0], [-delta, 0], [0, delta], [0, -delta]):
                lap += fundamental_solution(x + off, y)
            assert abs(lap / delta**2) < 1e-6


class TestDoubleLayer:
    def test_circle_kernel_is_constant(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            a, b = rng.uniform(0, 2 * np.pi, 2)
            if abs(a - b) < 1e-3:
                continue
            x = np.array([np.cos(a), np.sin(a)])
            y = np.array([np.cos(b), np.sin(b)])
            got = double_layer_kernel(x, y, y)
            assert got == pytest.approx(-1 / (4 * np.pi), abs=1e-12)

    def test_orthogonal_normal_vanishes(self):
        x, y = np.array([0.0, 0.0]), np.array([2.0, 0.0])
        assert double_layer_kernel(x, y, [0.0, 1.0]) == 0.0

    def test_reciprocity_with_adjoint(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            x, y = rng.standard_normal(2), rng.standard_normal(2)
            n = rng.standard_normal(2)
            n /= np.linalg.norm(n)
            assert double_layer_kernel(x, y, n) == pytest.approx(
                adjoint_double_layer_kernel(y, x, n), abs=1e-15
            )


class TestCoincidentLimit:
    def test_unit_circle(self):
        got = coincident_limit_double_layer(unit_circle(), 1.234)
        assert got == pytest.approx(-1 / (4 * np.pi), abs=1e-14)

    def test_straight_segment(self):
        space = SplineSpace(3, [0, 0, 0, 1, 1, 1])
        seg = BsplineCurve(space, np.array([[0, 0], [0.5, 0.5], [1, 1.0]]))
        assert coincident_limit_double_layer(seg, 0.5) == pytest.approx(0.0, abs=1e-15)

    def test_limit_approached_first_order(self):
        circle = unit_circle()
        t = 0.8
        x = circle.point([t])[:, 0]
        limit = coincident_limit_double_layer(circle, t)
        errs = []
        for delta in (1e-2, 1e-3, 1e-4):
            fr = circle.frame([t + delta])
            val = double_layer_kernel(x, fr.points[:, 0], fr.normals[:, 0])
            errs.append(abs(val - limit))
        # On the circle the kernel is exactly constant; roundoff in r^2
        # grows like eps/delta^2, hence the loose floor.
        assert max(errs) < 1e-9

    def test_limit_study_on_spline_curve(self):
        from igabem.gallery import freeform_curve

        curve = freeform_curve()
        t = 0.55
        x = curve.point([t])[:, 0]
        limit = coincident_limit_double_layer(curve, t)
        deltas = np.array([4e-3, 2e-3, 1e-3])
        errs = []
        for delta in deltas:
            fr = curve.frame([t + delta])
            errs.append(abs(double_layer_kernel(x, fr.points[:, 0], fr.normals[:, 0]) - limit))
        errs = np.array(errs)
        rates = errs[:-1] / errs[1:]
        assert np.all(rates > 1.6)  # first order in the parameter offset

    def test_corner_rejected(self):
        from igabem.gallery import pacman_curve

        with pytest.raises(SingularEvaluation):
            coincident_limit_double_layer(pacman_curve(), 1.0)
