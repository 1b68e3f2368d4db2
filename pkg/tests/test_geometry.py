import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from obdqa.errors import DegenerateInputError, EmptyInputError, InvalidGeometryError
from obdqa.geometry import (Defect, Envelope, Polygon, bounding_envelope, centroid,
                            convex_hull, intersection_area, is_valid, normalize, polygon_area,
                            union_area, validate)
from conftest import square
from oracles import random_star_polygon, raster_centroid, raster_intersection_area, rect_overlap


def test_unit_square_area():
    assert polygon_area(normalize(Polygon.from_coords([(0, 0), (1, 0), (1, 1), (0, 1)]))) == 1.0


def test_triangle_area():
    assert polygon_area(normalize(Polygon.from_coords([(0, 0), (1, 0), (0, 1)]))) == 0.5


def test_collinear_ring_rejected():
    p = normalize(Polygon.from_coords([(0, 0), (1, 1), (2, 2)]))
    with pytest.raises(InvalidGeometryError):
        polygon_area(p)


def test_non_finite_rejected():
    p = Polygon.from_coords([(0, 0), (math.nan, 0), (1, 1)])
    assert validate(p) == [Defect.NON_FINITE]
    with pytest.raises(InvalidGeometryError):
        polygon_area(p)


def test_hole_subtracted():
    p = normalize(Polygon.from_coords([(0, 0), (4, 0), (4, 4), (0, 4)],
                                      [[(1, 1), (2, 1), (2, 2), (1, 2)]]))
    assert polygon_area(p) == 15.0
    assert p.holes[0].signed_area() < 0


@pytest.mark.parametrize("other, expected", [
    (square(0, 0), 1.0),
    (square(5, 5), 0.0),
    (square(0.5, 0), 0.5),
])
def test_intersection_area_fixtures(other, expected):
    assert intersection_area(square(0, 0), other) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("other, expected", [
    (square(0, 0), 1.0),
    (square(5, 5), 2.0),
    (square(0.5, 0), 1.5),
])
def test_union_area_fixtures(other, expected):
    assert union_area(square(0, 0), other) == pytest.approx(expected, abs=1e-12)


def test_shared_edge_and_touching_vertex_have_zero_overlap():
    assert intersection_area(square(0, 0), square(1, 0)) == 0.0
    assert intersection_area(square(0, 0), square(1, 1)) == 0.0


def test_invalid_input_to_overlay_raises():
    bowtie = Polygon.from_coords([(0, 0), (1, 1), (1, 0), (0, 1)])
    with pytest.raises(InvalidGeometryError):
        intersection_area(bowtie, square(0, 0))


def test_validate_diagnostics():
    bowtie = Polygon.from_coords([(0, 0), (1, 1), (1, 0), (0, 1), (0, 0)])
    assert Defect.SELF_INTERSECTION in validate(bowtie)
    cw = Polygon.from_coords([(0, 0), (0, 1), (1, 1), (1, 0), (0, 0)])
    assert validate(cw) == [Defect.WRONG_WINDING]
    assert Defect.WRONG_WINDING.fixable
    assert validate(normalize(cw)) == []
    assert validate(square(0, 0)) == []


def test_normalize_fixes_closure_and_duplicates_not_topology():
    raw = Polygon.from_coords([(0, 0), (1, 0), (1, 0), (1, 1), (0, 1)])
    assert Defect.DUPLICATE_VERTEX in validate(raw)
    assert Defect.NOT_CLOSED in validate(raw)
    fixed = normalize(raw)
    assert validate(fixed) == []
    assert len(fixed.exterior.coords) == 5 and fixed.exterior.coords[0] == fixed.exterior.coords[-1]
    bowtie = normalize(Polygon.from_coords([(0, 0), (1, 1), (1, 0), (0, 1)]))
    assert not is_valid(bowtie)


def test_near_duplicate_vertices_snapped():
    raw = Polygon.from_coords([(0, 0), (1, 0), (1 + 1e-12, 1e-12), (1, 1), (0, 1)])
    assert len(normalize(raw).exterior.vertices) == 4


def test_hole_outside_exterior_is_defect():
    p = normalize(Polygon.from_coords([(0, 0), (1, 0), (1, 1), (0, 1)],
                                      [[(2, 2), (3, 2), (3, 3), (2, 3)]]))
    assert Defect.HOLE_OUTSIDE in validate(p)


def test_convex_hull_excludes_interior_point():
    hull = convex_hull([(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)])
    assert set(hull.exterior.vertices) == {(0, 0), (1, 0), (1, 1), (0, 1)}
    assert hull.exterior.signed_area() > 0


def test_convex_hull_triangle():
    hull = convex_hull([(0, 0), (2, 0), (0, 3)])
    assert set(hull.exterior.vertices) == {(0, 0), (2, 0), (0, 3)}


@pytest.mark.parametrize("pts", [[(0, 0), (1, 1)], [(0, 0), (1, 1), (2, 2), (3, 3)], [(1, 1)] * 5])
def test_convex_hull_degenerate(pts):
    with pytest.raises(DegenerateInputError):
        convex_hull(pts)


def test_convex_hull_random_disc():
    rng = np.random.default_rng(7)
    r = np.sqrt(rng.uniform(0, 1, 1000))
    t = rng.uniform(0, 2 * np.pi, 1000)
    pts = np.column_stack([r * np.cos(t), r * np.sin(t)])
    hull = convex_hull(pts.tolist())
    verts = hull.exterior.vertices
    inputs = {tuple(p) for p in pts.tolist()}
    assert all(tuple(v) in inputs for v in verts)
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        ex, ey = b.x - a.x, b.y - a.y
        length = math.hypot(ex, ey)
        sd = (ex * (pts[:, 1] - a.y) - ey * (pts[:, 0] - a.x)) / length
        assert sd.min() >= -1e-9
        c = verts[(i + 2) % n]
        assert ex * (c.y - b.y) - ey * (c.x - b.x) > 0


def test_centroid_fixtures():
    assert centroid(square(0, 0)) == pytest.approx((0.5, 0.5))
    tri = normalize(Polygon.from_coords([(0, 0), (3, 0), (0, 3)]))
    assert centroid(tri) == pytest.approx((1.0, 1.0))


def test_centroid_l_shape_matches_raster_oracle():
    ring = [(0, 0), (3, 0), (3, 1), (1, 1), (1, 3), (0, 3)]
    c = centroid(normalize(Polygon.from_coords(ring)))
    ox, oy = raster_centroid(ring, rows=20000)
    assert abs(c.x - ox) < 1e-3 and abs(c.y - oy) < 1e-3


def test_centroid_zero_area():
    p = Polygon.from_coords([(0, 0), (1, 1), (2, 2), (0, 0)])
    with pytest.raises(DegenerateInputError):
        centroid(p)


def test_bounding_envelope():
    assert bounding_envelope([square(0, 0)]) == Envelope(0, 0, 1, 1)
    assert bounding_envelope([square(0, 0), square(10, 10)]) == Envelope(0, 0, 11, 11)
    assert Envelope(2, 3, 2, 3).width == 0
    with pytest.raises(EmptyInputError):
        bounding_envelope([])


coord = st.floats(-100, 100, allow_nan=False)
size = st.floats(0.01, 50, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(coord, coord, size, size, coord, coord, size, size)
def test_rectangle_overlap_closed_form(x1, y1, w1, h1, x2, y2, w2, h2):
    r1, r2 = (x1, y1, x1 + w1, y1 + h1), (x2, y2, x2 + w2, y2 + h2)
    a, b = Polygon.box(*r1), Polygon.box(*r2)
    expected = rect_overlap(r1, r2)
    got = intersection_area(a, b)
    assert got == pytest.approx(expected, rel=1e-9, abs=1e-9 * min(w1 * h1, w2 * h2))
    assert intersection_area(b, a) == got
    assert 0 <= got <= min(polygon_area(a), polygon_area(b))
    assert union_area(a, b) == pytest.approx(polygon_area(a) + polygon_area(b) - got, rel=1e-9)


def test_random_star_polygons_match_raster_oracle():
    rng = np.random.default_rng(11)
    for _ in range(40):
        ra = random_star_polygon(rng, (0, 0), rng.uniform(1, 5))
        rb = random_star_polygon(rng, tuple(rng.uniform(-2, 2, 2)), rng.uniform(1, 5))
        a, b = normalize(Polygon.from_coords(ra)), normalize(Polygon.from_coords(rb))
        got = intersection_area(a, b)
        want = raster_intersection_area(ra, rb)
        assert abs(got - want) <= 0.005 * min(polygon_area(a), polygon_area(b))
