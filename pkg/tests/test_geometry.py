import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccdeg.errors import ToolkitError
from ccdeg.geometry import (
    Box,
    body_contains_body,
    contains,
    convex_hull,
    distance,
    hausdorff_distance,
    interval_body,
    project,
)

UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]


class TestConvexHull:
    def test_two_reals(self):
        h = convex_hull([(0.0,), (1.0,)])
        assert (h.lo, h.hi) == (0.0, 1.0)

    def test_interior_point_dropped(self):
        h = convex_hull(UNIT_SQUARE + [(0.5, 0.5)])
        assert len(h.vertices) == 4
        assert set(h.vertices) == set(UNIT_SQUARE)

    def test_collinear_degenerates_to_segment(self):
        h = convex_hull([(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)])
        assert len(h.vertices) == 2
        assert set(h.vertices) == {(0.0, 0.0), (2.0, 2.0)}

    def test_single_point(self):
        h = convex_hull([(0.3, 0.4)])
        assert h.vertices == ((0.3, 0.4),)
        assert h.is_point()

    def test_empty_is_error(self):
        with pytest.raises(ToolkitError, match="empty hull"):
            convex_hull([])

    def test_ccw_orientation(self):
        h = convex_hull(UNIT_SQUARE)
        area2 = 0.0
        v = h.vertices
        for i in range(len(v)):
            x0, y0 = v[i]
            x1, y1 = v[(i + 1) % len(v)]
            area2 += x0 * y1 - x1 * y0
        assert area2 > 0.0


class TestHausdorff:
    def test_identical_intervals(self):
        a = interval_body(0.0, 1.0)
        assert hausdorff_distance(a, a) == 0.0

    def test_endpoint_gap(self):
        assert hausdorff_distance(interval_body(0.0, 1.0), interval_body(0.0, 2.0)) == 1.0

    def test_shifted_square(self):
        a = convex_hull(UNIT_SQUARE)
        b = convex_hull([(x + 3.0, y + 4.0) for x, y in UNIT_SQUARE])
        assert hausdorff_distance(a, b) == pytest.approx(5.0, abs=1e-12)

    def test_shifted_square_brute_force(self):
        # Dense point clouds of both squares: max-min distances approximate
        # the same value from below.
        g = np.linspace(0.0, 1.0, 40)
        pa = np.array([(x, y) for x in g for y in g])
        pb = pa + np.array([3.0, 4.0])
        d_ab = max(np.min(np.hypot(*(pb - p).T)) for p in pa)
        d_ba = max(np.min(np.hypot(*(pa - p).T)) for p in pb)
        assert max(d_ab, d_ba) == pytest.approx(5.0, abs=0.1)

    def test_dimension_mismatch(self):
        with pytest.raises(ToolkitError):
            hausdorff_distance(interval_body(0.0, 1.0), convex_hull(UNIT_SQUARE))


class TestContains:
    def test_symmetric_interval_contains_zero(self):
        assert contains(interval_body(-0.5, 0.5), (0.0,), 0.0)

    def test_right_endpoint(self):
        assert contains(interval_body(1.0 / 6.0, 1.0 / 3.0), (1.0 / 3.0,), 0.0)

    def test_just_outside(self):
        assert not contains(interval_body(1.0 / 6.0, 1.0 / 3.0), (0.34,), 0.0)

    def test_polygon_interior_and_edge(self):
        sq = convex_hull(UNIT_SQUARE)
        assert contains(sq, (0.5, 0.5), 0.0)
        assert contains(sq, (1.0, 0.5), 0.0)
        assert not contains(sq, (1.1, 0.5), 1e-3)


class TestProject:
    def test_interval_clamp(self):
        body = interval_body(0.0, 1.0)
        assert project(body, (2.0,)) == (1.0,)
        assert project(body, (-1.0,)) == (0.0,)
        assert project(body, (0.25,)) == (0.25,)

    def test_polygon_projection_is_closest(self):
        sq = convex_hull(UNIT_SQUARE)
        p = project(sq, (2.0, 0.5))
        assert p == pytest.approx((1.0, 0.5))
        assert distance((2.0, 0.5), sq) == pytest.approx(1.0)

    def test_projection_idempotent_inside(self):
        sq = convex_hull(UNIT_SQUARE)
        assert project(sq, (0.3, 0.7)) == (0.3, 0.7)


points_1d = st.lists(
    st.tuples(st.floats(-10, 10, allow_nan=False)), min_size=1, max_size=12
)
points_2d = st.lists(
    st.tuples(st.floats(-10, 10, allow_nan=False), st.floats(-10, 10, allow_nan=False)),
    min_size=1,
    max_size=12,
)


@given(points_2d)
@settings(max_examples=80, deadline=None)
def test_hull_idempotence(pts):
    h = convex_hull(pts)
    h2 = convex_hull(list(h.vertices))
    assert hausdorff_distance(h, h2) <= 1e-9


@given(points_2d, points_2d)
@settings(max_examples=80, deadline=None)
def test_hull_monotonicity(p, q):
    h_small = convex_hull(p)
    h_big = convex_hull(p + q)
    assert body_contains_body(h_big, h_small, 1e-9)


@given(points_1d, points_1d, points_1d)
@settings(max_examples=80, deadline=None)
def test_hausdorff_triangle_inequality(p, q, r):
    a, b, c = convex_hull(p), convex_hull(q), convex_hull(r)
    assert hausdorff_distance(a, c) <= (
        hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-9
    )


@given(points_2d, points_2d, points_2d)
@settings(max_examples=40, deadline=None)
def test_hausdorff_triangle_inequality_2d(p, q, r):
    a, b, c = convex_hull(p), convex_hull(q), convex_hull(r)
    assert hausdorff_distance(a, c) <= (
        hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-9
    )


def _halfplane_inside(verts, p, slack):
    n = len(verts)
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        if (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax) < -slack:
            return False
    return True


def test_contains_matches_rasterization(rng):
    for _ in range(20):
        pts = [(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(8)]
        body = convex_hull(pts)
        if len(body.vertices) < 3:
            continue
        xs = np.linspace(-2.5, 2.5, 21)
        for x in xs:
            for y in xs:
                d_edges = min(
                    _seg_dist((x, y), body.vertices[i], body.vertices[(i + 1) % len(body.vertices)])
                    for i in range(len(body.vertices))
                )
                if d_edges < 1e-6:
                    continue  # too close to the boundary to classify robustly
                expected = _halfplane_inside(body.vertices, (x, y), 0.0)
                assert contains(body, (x, y), 1e-9) == expected


def _seg_dist(p, a, b):
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    den = dx * dx + dy * dy
    t = 0.0 if den == 0 else max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / den))
    return math.dist(p, (ax + t * dx, ay + t * dy))


def test_box_grid_and_boundary():
    b = Box((0.0, 0.0), (2.0, 1.0))
    g = b.grid(3)
    assert len(g) == 9
    assert (0.0, 0.0) in g and (2.0, 1.0) in g
    bd = b.boundary_points(12)
    assert len(bd) == 12
    assert all(
        min(abs(x - 0.0), abs(x - 2.0), abs(y - 0.0), abs(y - 1.0)) < 1e-12
        for x, y in bd
    )
