"""Curve frames, meshes, polygonal approximation and orientation checks."""

import numpy as np
import pytest

from igabem.gallery import (
    annulus_curves,
    freeform_curve,
    pacman_curve,
    parabola_arc,
    quasi_circle,
)
from igabem.geometry import (
    BsplineCurve,
    GeometryError,
    arclength,
    contains_point,
    induced_mesh,
    polygonal_boundary,
    unit_circle,
)
from igabem.splines import SplineSpace


def segment_curve(p0=(0.0, 0.0), p1=(1.0, 0.0)):
    space = SplineSpace(2, [0, 0, 1, 1])
    return BsplineCurve(space, np.array([p0, p1], dtype=float))


class TestFrame:
    def test_parabola_frame_at_apex(self):
        # Normal is (0, 1) up to the outward_sign convention; the rotation
        # (C2', -C1')/|C'| gives (0, -1) for sign +1.
        arc = parabola_arc()
        fr = arc.frame([0.0])
        np.testing.assert_allclose(fr.points[:, 0], [0.0, 1.0], atol=1e-14)
        np.testing.assert_allclose(fr.derivatives[:, 0], [1.0, 0.0], atol=1e-14)
        np.testing.assert_allclose(fr.normals[:, 0] * arc.outward_sign, [0.0, -1.0], atol=1e-14)

    def test_parabola_is_the_graph(self):
        arc = parabola_arc()
        ts = np.linspace(-1, 1, 33)
        pts = arc.point(ts)
        np.testing.assert_allclose(pts[0], ts, atol=1e-14)
        np.testing.assert_allclose(pts[1], 1 - ts**2, atol=1e-14)

    def test_pacman_starts_at_origin(self):
        fr = pacman_curve().frame([0.0])
        np.testing.assert_allclose(fr.points[:, 0], [0.0, 0.0], atol=1e-15)

    def test_unit_speed_segment(self):
        fr = segment_curve().frame(np.linspace(0.01, 0.99, 7))
        np.testing.assert_allclose(fr.jacobians, 1.0, atol=1e-15)
        np.testing.assert_allclose(fr.normals[1], -1.0, atol=1e-15)

    def test_normals_unit_length(self):
        curve = freeform_curve()
        fr = curve.frame(np.linspace(0.01, 0.99, 50))
        np.testing.assert_allclose(np.hypot(*fr.normals), 1.0, atol=1e-14)

    def test_degenerate_derivative_rejected(self):
        space = SplineSpace(3, [0, 0, 0, 1, 1, 1])
        bad = BsplineCurve(space, np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]]))
        with pytest.raises(GeometryError):
            bad.frame([0.0])


class TestOrientation:
    """The exact flux of u = -(x1+x2) pins the outward-normal convention."""

    @pytest.mark.parametrize("curve", [pacman_curve(), freeform_curve()])
    def test_flux_identity(self, curve):
        rng = np.random.default_rng(4)
        ts = rng.uniform(curve.a + 0.01, curve.b - 0.01, 100)
        fr = curve.frame(ts)
        flux_formula = (fr.derivatives[0] - fr.derivatives[1]) / fr.jacobians
        flux_normal = -(fr.normals[0] + fr.normals[1])
        np.testing.assert_allclose(flux_formula, flux_normal, atol=1e-13)

    @pytest.mark.parametrize("variant", ["a", "b"])
    def test_annulus_normals_leave_the_annulus(self, variant):
        outer, inner = annulus_curves(variant)
        for curve in (outer, inner):
            ts = np.linspace(0.02, 0.98, 25)
            fr = curve.frame(ts)
            probes = fr.points + 1e-3 * fr.normals
            for p in probes.T:
                in_annulus = contains_point(outer, p) and not contains_point(inner, p)
                assert not in_annulus

    def test_closed_flags(self):
        assert pacman_curve().closed
        assert freeform_curve().closed
        assert not parabola_arc().closed


class TestMesh:
    def test_pacman_unit_mesh(self):
        mesh = induced_mesh(pacman_curve(), 9)
        assert mesh.n_elements == 9 and mesh.h == 1.0
        np.testing.assert_allclose(mesh.elements[:, 0], np.arange(9.0))

    def test_freeform_eighths(self):
        mesh = induced_mesh(freeform_curve(), 8)
        assert mesh.h == pytest.approx(1 / 8)

    def test_single_element_open_arc(self):
        mesh = induced_mesh(parabola_arc(), 1)
        assert mesh.element(0) == (-1.0, 1.0)

    def test_misaligned_breakpoints_rejected(self):
        with pytest.raises(GeometryError):
            induced_mesh(pacman_curve(), 5)

    def test_closed_needs_three_elements(self):
        with pytest.raises(GeometryError):
            induced_mesh(quasi_circle(), 2)


class TestPolygon:
    def test_square_through_mesh_points(self):
        circle = unit_circle()
        poly = polygonal_boundary(circle, induced_mesh(circle, 4))
        np.testing.assert_allclose(
            poly.vertices[:4],
            [[1, 0], [0, 1], [-1, 0], [0, -1]],
            atol=1e-14,
        )
        np.testing.assert_allclose(poly.vertices[0], poly.vertices[-1])

    def test_chord_deviation_second_order(self):
        arc = parabola_arc()
        devs = []
        for n in (20, 40):
            poly = polygonal_boundary(arc, induced_mesh(arc, n))
            ts = np.linspace(-1, 1, 2000)
            devs.append(np.abs(poly.point(ts) - arc.point(ts)).max())
        assert devs[0] / devs[1] == pytest.approx(4.0, rel=0.1)

    def test_polyline_shorter_than_curve(self):
        curve = freeform_curve()
        poly = polygonal_boundary(curve, induced_mesh(curve, 8))
        assert poly.total_length() <= arclength(curve) + 1e-9

    def test_polygon_frames_piecewise_constant(self):
        arc = parabola_arc()
        poly = polygonal_boundary(arc, induced_mesh(arc, 10))
        fr = poly.frame(np.array([-0.99, -0.85]))
        np.testing.assert_allclose(fr.normals[:, 0], fr.normals[:, 1], atol=1e-14)


class TestRefinement:
    def test_pointwise_geometry_preserved(self):
        curve = pacman_curve()
        fine = curve.refine_uniform()
        ts = np.random.default_rng(9).uniform(0, 9, 50)
        np.testing.assert_allclose(fine.point(ts), curve.point(ts), atol=1e-12)
        fr0, fr1 = curve.frame(ts), fine.frame(ts)
        np.testing.assert_allclose(fr1.derivatives, fr0.derivatives, atol=1e-12)

    def test_breakpoint_count_doubles(self):
        curve = freeform_curve()
        fine = curve.refine_uniform()
        assert fine.breakpoints.size - 1 == 2 * (curve.breakpoints.size - 1)

    def test_dof_76_after_three_refinements(self):
        curve = pacman_curve()
        for _ in range(3):
            curve = curve.refine_uniform()
        assert curve.space.dimension == 76

    def test_arclength_invariant(self):
        curve = freeform_curve()
        fine = curve.refine_uniform()
        assert arclength(fine) == pytest.approx(arclength(curve), rel=1e-12)

    def test_all_examples_geometrically_exact_under_refinement(self):
        for curve in (pacman_curve(), freeform_curve(), parabola_arc(), *annulus_curves("a")):
            fine = curve.refine_uniform().refine_uniform()
            ts = np.linspace(curve.a, curve.b, 67)
            np.testing.assert_allclose(fine.point(ts), curve.point(ts), atol=1e-12)


class TestQuasiCircle:
    def test_closed_and_c1(self):
        qc = quasi_circle()
        assert qc.closed
        fr_a = qc.frame([qc.a], side="right")
        fr_b = qc.frame([qc.b], side="left")
        np.testing.assert_allclose(
            fr_a.derivatives / fr_a.jacobians,
            fr_b.derivatives / fr_b.jacobians,
            atol=1e-12,
        )

    def test_radius_close_to_one(self):
        qc = quasi_circle()
        pts = qc.point(np.linspace(0, 8, 500))
        radii = np.hypot(pts[0], pts[1])
        assert radii.min() > 0.97 and radii.max() < 1.03
