"""Outer map: support points, orientation, periods, singular detection.

The triangle period-6 orbit used here was worked out by hand: starting at
(0, -1) below the apex-up equilateral triangle, six reflections through
alternating vertices close the hexagon exactly, winding around twice.
"""

import numpy as np
import pytest

from outerlab.dynamics import (
    ConvexCurve,
    iterate,
    orbit_polygon,
    outer_map,
    tangency_point,
)
from outerlab.errors import (
    InputError,
    InsideCurve,
    NotPeriodic,
    SingularLine,
    SingularOrbit,
    ValidationFailed,
)
from outerlab.geometry import det2

from conftest import SQUARE_VERTICES, TRIANGLE_VERTICES

SQRT3 = np.sqrt(3.0)

# one full revolution of the hand-checked orbit
TRIANGLE_ORBIT = np.array(
    [
        [0.0, -1.0],
        [SQRT3, 0.0],
        [-SQRT3, 2.0],
        [0.0, -3.0],
        [SQRT3, 2.0],
        [-SQRT3, 0.0],
    ]
)


@pytest.fixture(scope="module")
def tri_curve():
    return ConvexCurve.polygon(TRIANGLE_VERTICES)


@pytest.fixture(scope="module")
def sq_curve():
    return ConvexCurve.polygon(SQUARE_VERTICES)


@pytest.fixture(scope="module")
def circle():
    return ConvexCurve.circle(radius=1.0, samples=4096)


def test_curve_validation_rejects_nonconvex():
    with pytest.raises(InputError):
        ConvexCurve.polygon([[0.0, 0.0], [2.0, 1.0], [0.0, 0.5], [-2.0, 1.0]])
    with pytest.raises(InputError):
        ConvexCurve.polygon([[0.0, 0.0], [1.0, 0.0]])


def test_curve_basic_queries(sq_curve):
    assert sq_curve.contains([0.0, 0.0])
    assert sq_curve.contains([1.0, 1.0])  # boundary counts as inside
    assert not sq_curve.contains([1.5, 0.0])
    assert sq_curve.distance_to_boundary([2.0, 0.0]) == pytest.approx(1.0)
    assert sq_curve.distance_to_boundary([0.5, 1.0]) == pytest.approx(0.0, abs=1e-15)


def test_square_tangency_oracle(sq_curve):
    p = tangency_point(sq_curve, [2.0, 0.5])
    assert np.allclose(p, [1.0, 1.0])
    assert np.allclose(outer_map(sq_curve, [2.0, 0.5]), [0.0, 1.5])


def test_curve_stays_left_of_the_ray(sq_curve, circle):
    rng = np.random.default_rng(3)
    for curve in (sq_curve, circle):
        for _ in range(50):
            ang = rng.uniform(0, 2 * np.pi)
            z = np.array([np.cos(ang), np.sin(ang)]) * rng.uniform(1.7, 6.0)
            f = outer_map(curve, z)
            # every sampled boundary point sits on or left of the oriented ray
            side = det2(f - z, curve.points - z)
            assert np.min(side) > -1e-6 * curve.diameter**2
            # the tangency point is the midpoint of the reflection
            assert np.allclose((z + f) / 2.0, tangency_point(curve, z))


def test_circle_tangency_geometry(circle):
    p = tangency_point(circle, [2.0, 0.0])
    # |p| = 1 and the left-side convention picks the upper tangent point
    assert abs(np.hypot(*p) - 1.0) < 1e-6
    assert np.allclose(p, [0.5, SQRT3 / 2.0], atol=1e-4)
    # tangency: the radius is orthogonal to the sight line
    assert abs(np.dot(p, p - np.array([2.0, 0.0]))) < 1e-4


def test_inside_start_rejected(sq_curve, circle):
    with pytest.raises(InsideCurve):
        outer_map(sq_curve, [0.2, -0.3])
    with pytest.raises(InsideCurve):
        tangency_point(circle, [0.0, 0.0])


def test_singular_line_on_edge_extension(tri_curve):
    # (-2, -1/2) continues the bottom edge to the left: the supporting line
    # with the triangle on the left contains two vertices
    with pytest.raises(SingularLine):
        tangency_point(tri_curve, [-2.0, -0.5])
    with pytest.raises(SingularOrbit) as err:
        iterate(tri_curve, [-2.0, -0.5], steps=10)
    assert err.value.step == 0
    # from the mirrored point the edge line is a secant on the right side of
    # the sight ray, so the map is regular there
    assert np.allclose(tangency_point(tri_curve, [2.0, -0.5]), [0.0, 1.0])


def test_singular_orbit_mid_flight(tri_curve):
    # one reflection through the right vertex sends this start onto the
    # extension of the left edge, so the orbit aborts at step 1 instead of 0
    z = np.array([SQRT3 / 2.0, -3.5])
    w = outer_map(tri_curve, z)
    assert np.allclose(w, [SQRT3 / 2.0, 2.5])
    with pytest.raises(SingularOrbit) as err:
        iterate(tri_curve, z, steps=10)
    assert err.value.step == 1


def test_triangle_period_six(tri_curve):
    rec = iterate(tri_curve, [0.0, -1.0], steps=50)
    assert rec.period == 6
    assert rec.winding == 2
    assert rec.closure_residual == 0.0  # reflections through vertices are exact
    assert not rec.singular_flag
    assert np.allclose(rec.points[:6], TRIANGLE_ORBIT)
    # the recorded tail continues past the closure point
    assert np.array_equal(rec.points[6], rec.start)


def test_triangle_orbit_polygon_certified(tri_curve):
    rec = iterate(tri_curve, [0.0, -1.0], steps=50)
    poly = orbit_polygon(rec, curve=tri_curve)
    assert poly.n == 6
    assert poly.winding == 2
    assert poly.locally_convex
    # midpoints are the tangency points: here the triangle's vertices
    mids = poly.rbar
    dists = [tri_curve.distance_to_boundary(q) for q in mids]
    assert max(dists) < 1e-14


def test_perturbed_starts_keep_period(tri_curve):
    diam = tri_curve.diameter
    for k in range(6):
        ang = 2 * np.pi * k / 6 + 0.1
        z = TRIANGLE_ORBIT[0] + 1e-3 * diam * np.array([np.cos(ang), np.sin(ang)])
        rec = iterate(tri_curve, z, steps=100)
        assert rec.period == 6
        assert rec.winding == 2
        assert rec.closure_residual < 1e-9 * diam


def test_period_certification_needs_return(sq_curve):
    # a far start cannot close up in 8 steps: each double step translates
    # by at most twice the curve diameter
    rec = iterate(sq_curve, [10.1, 0.37], steps=8)
    assert rec.period is None
    assert rec.winding is None
    with pytest.raises(NotPeriodic):
        orbit_polygon(rec)


def test_iterate_input_validation(sq_curve):
    with pytest.raises(InputError):
        iterate(sq_curve, [3.0, 0.0], steps=0)


def test_orbit_polygon_midpoint_gate(tri_curve, sq_curve):
    rec = iterate(tri_curve, [0.0, -1.0], steps=20)
    # against the wrong curve the midpoints are far from the boundary
    with pytest.raises(ValidationFailed):
        orbit_polygon(rec, curve=sq_curve)


def test_smooth_curve_without_tangents():
    th = np.linspace(0.0, 2.0 * np.pi, 1024, endpoint=False)
    pts = np.column_stack([2.0 * np.cos(th), np.sin(th)])  # ellipse
    curve = ConvexCurve.smooth(pts)  # tangents by central differences
    z = np.array([4.0, 1.0])
    f = outer_map(curve, z)
    p = (z + f) / 2.0
    assert curve.distance_to_boundary(p) < 1e-4
    side = det2(f - z, curve.points - z)
    assert np.min(side) > -1e-4 * curve.diameter**2


def test_circle_orbit_stays_on_invariant_ring(circle):
    # outer map around a circle preserves the distance to the center
    z = np.array([1.5, 0.4])
    radius = np.hypot(*z)
    for _ in range(25):
        z = outer_map(circle, z)
        assert abs(np.hypot(*z) - radius) < 1e-4
