"""Planar geometry primitives in projected metres.

Areas, hulls, centroids and validity checks are computed here directly.
Boolean overlay areas are delegated to GEOS (via shapely), which is robust to
shared edges and touching vertices.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import shapely
from shapely.geometry import Polygon as _ShapelyPolygon

from .errors import DegenerateInputError, EmptyInputError, InvalidGeometryError

SNAP_TOLERANCE = 1e-9


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Ring:
    """Closed ring; ``coords[0] == coords[-1]`` once normalized."""

    coords: tuple[Point2, ...]

    @property
    def vertices(self) -> tuple[Point2, ...]:
        """Vertices without the closing duplicate."""
        c = self.coords
        if len(c) > 1 and c[0] == c[-1]:
            return c[:-1]
        return c

    def signed_area(self) -> float:
        return _signed_area(self.vertices)

    def is_closed(self) -> bool:
        return len(self.coords) > 1 and self.coords[0] == self.coords[-1]


@dataclass(frozen=True)
class Polygon:
    exterior: Ring
    holes: tuple[Ring, ...] = field(default_factory=tuple)

    @classmethod
    def from_coords(cls, exterior: Iterable[Sequence[float]],
                    holes: Iterable[Iterable[Sequence[float]]] = ()) -> "Polygon":
        """Build a raw (un-normalized) polygon from coordinate sequences."""
        ext = Ring(tuple(Point2(float(x), float(y)) for x, y, *_ in exterior))
        hs = tuple(Ring(tuple(Point2(float(x), float(y)) for x, y, *_ in h)) for h in holes)
        return cls(ext, hs)

    @classmethod
    def box(cls, min_x: float, min_y: float, max_x: float, max_y: float) -> "Polygon":
        return normalize(cls.from_coords(
            [(min_x, min_y), (max_x, min_y), (max_x, max_y), (min_x, max_y)]))

    @property
    def rings(self) -> tuple[Ring, ...]:
        return (self.exterior, *self.holes)

    @cached_property
    def shape(self) -> _ShapelyPolygon:
        """The equivalent shapely polygon (built lazily, cached)."""
        return _ShapelyPolygon(self.exterior.vertices, [h.vertices for h in self.holes])

    def to_coords(self) -> list[list[list[float]]]:
        return [[[p.x, p.y] for p in r.coords] for r in self.rings]


@dataclass(frozen=True)
class Envelope:
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    def __post_init__(self):
        if self.min_x > self.max_x or self.min_y > self.max_y:
            raise ValueError(f"inverted envelope {self}")

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y

    @property
    def corners(self) -> tuple[Point2, Point2, Point2, Point2]:
        return (Point2(self.min_x, self.min_y), Point2(self.max_x, self.min_y),
                Point2(self.max_x, self.max_y), Point2(self.min_x, self.max_y))

    def union(self, other: "Envelope") -> "Envelope":
        return Envelope(min(self.min_x, other.min_x), min(self.min_y, other.min_y),
                        max(self.max_x, other.max_x), max(self.max_y, other.max_y))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.min_x, self.min_y, self.max_x, self.max_y)


class Defect(enum.Enum):
    NON_FINITE = "non-finite coordinate"
    TOO_FEW_VERTICES = "fewer than 3 distinct vertices"
    NOT_CLOSED = "ring not closed"
    DUPLICATE_VERTEX = "consecutive duplicate vertex"
    WRONG_WINDING = "wrong winding order"
    ZERO_AREA = "zero area"
    SELF_INTERSECTION = "self-intersection"
    HOLE_OUTSIDE = "hole not strictly inside exterior"

    @property
    def fixable(self) -> bool:
        return self in _FIXABLE


_FIXABLE = {Defect.NOT_CLOSED, Defect.DUPLICATE_VERTEX, Defect.WRONG_WINDING}


def _signed_area(pts: Sequence[Point2]) -> float:
    n = len(pts)
    if n < 3:
        return 0.0
    # shift to first vertex: keeps the shoelace sum well conditioned for UTM-sized coordinates
    x0, y0 = pts[0]
    s = 0.0
    for i in range(1, n - 1):
        ax, ay = pts[i].x - x0, pts[i].y - y0
        bx, by = pts[i + 1].x - x0, pts[i + 1].y - y0
        s += ax * by - bx * ay
    return 0.5 * s


def _dedupe(pts: Sequence[Point2]) -> list[Point2]:
    out: list[Point2] = []
    for p in pts:
        if out and abs(p.x - out[-1].x) <= SNAP_TOLERANCE and abs(p.y - out[-1].y) <= SNAP_TOLERANCE:
            continue
        out.append(p)
    while len(out) > 1 and (abs(out[0].x - out[-1].x) <= SNAP_TOLERANCE
                            and abs(out[0].y - out[-1].y) <= SNAP_TOLERANCE):
        out.pop()
    return out


def _normalize_ring(ring: Ring, ccw: bool) -> Ring:
    pts = _dedupe(ring.coords)
    if len(pts) >= 3 and (_signed_area(pts) > 0) != ccw:
        pts.reverse()
    return Ring(tuple(pts) + (pts[0],) if pts else ())


def normalize(p: Polygon) -> Polygon:
    """Close rings, drop consecutive duplicates, orient exterior CCW and holes CW.

    Topology is never changed: a self-intersecting input stays self-intersecting.
    """
    return Polygon(_normalize_ring(p.exterior, True),
                   tuple(_normalize_ring(h, False) for h in p.holes))


def _orient(a: Point2, b: Point2, c: Point2) -> float:
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _on_segment(a: Point2, b: Point2, p: Point2) -> bool:
    return (min(a.x, b.x) <= p.x <= max(a.x, b.x)) and (min(a.y, b.y) <= p.y <= max(a.y, b.y))


def segments_intersect(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool:
    """Closed-segment intersection test (touching counts)."""
    d1, d2 = _orient(q1, q2, p1), _orient(q1, q2, p2)
    d3, d4 = _orient(p1, p2, q1), _orient(p1, p2, q2)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    return ((d1 == 0 and _on_segment(q1, q2, p1)) or (d2 == 0 and _on_segment(q1, q2, p2))
            or (d3 == 0 and _on_segment(p1, p2, q1)) or (d4 == 0 and _on_segment(p1, p2, q2)))


def _ring_self_intersects(pts: Sequence[Point2]) -> bool:
    n = len(pts)
    edges = [(pts[i], pts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        a1, a2 = edges[i]
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                # adjacent edges share one vertex; they only defect if they fold back
                shared = a2 if j == i + 1 else a1
                b1, b2 = edges[j]
                other_a = a1 if shared == a2 else a2
                other_b = b2 if shared == b1 else b1
                if _orient(shared, other_a, other_b) == 0 and (
                        (other_a.x - shared.x) * (other_b.x - shared.x)
                        + (other_a.y - shared.y) * (other_b.y - shared.y)) > 0:
                    return True
                continue
            if segments_intersect(a1, a2, *edges[j]):
                return True
    return False


def point_in_ring(pt: Point2, pts: Sequence[Point2]) -> bool:
    """Even-odd test; boundary points are not guaranteed either way."""
    inside = False
    n = len(pts)
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        if (a.y > pt.y) != (b.y > pt.y):
            x = a.x + (pt.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if x > pt.x:
                inside = not inside
    return inside


def validate(p: Polygon) -> list[Defect]:
    """Diagnose ``p`` as given; an empty list means valid."""
    defects: list[Defect] = []

    def add(d: Defect):
        if d not in defects:
            defects.append(d)

    for ring in p.rings:
        if not all(math.isfinite(c) for pt in ring.coords for c in pt):
            return [Defect.NON_FINITE]
    for k, ring in enumerate(p.rings):
        if not ring.is_closed():
            add(Defect.NOT_CLOSED)
        raw = ring.vertices
        if any(raw[i] == raw[i + 1] for i in range(len(raw) - 1)):
            add(Defect.DUPLICATE_VERTEX)
        pts = _dedupe(ring.coords)
        if len(set(pts)) < 3:
            add(Defect.TOO_FEW_VERTICES)
            add(Defect.ZERO_AREA)
            continue
        area = _signed_area(pts)
        if _ring_self_intersects(pts):
            add(Defect.SELF_INTERSECTION)
        elif area == 0.0:
            add(Defect.ZERO_AREA)
        elif (area > 0) != (k == 0):
            add(Defect.WRONG_WINDING)
    if Defect.SELF_INTERSECTION not in defects and Defect.TOO_FEW_VERTICES not in defects:
        ext = _dedupe(p.exterior.coords)
        ext_edges = [(ext[i], ext[(i + 1) % len(ext)]) for i in range(len(ext))]
        for h in p.holes:
            hp = _dedupe(h.coords)
            crossing = any(segments_intersect(a, b, c, d) for a, b in ext_edges
                           for c, d in zip(hp, hp[1:] + hp[:1]))
            if crossing or not point_in_ring(hp[0], ext):
                add(Defect.HOLE_OUTSIDE)
    return defects


def is_valid(p: Polygon) -> bool:
    """True when normalization alone makes ``p`` a usable polygon."""
    return all(d.fixable for d in validate(p))


def _require_valid(p: Polygon) -> None:
    bad = [d for d in validate(p) if not d.fixable]
    if bad:
        raise InvalidGeometryError(", ".join(d.value for d in bad))


def polygon_area(p: Polygon) -> float:
    """Exterior area minus hole areas (square metres)."""
    _require_valid(p)
    return _area_unchecked(p)


def _area_unchecked(p: Polygon) -> float:
    a = abs(p.exterior.signed_area())
    for h in p.holes:
        a -= abs(h.signed_area())
    return max(a, 0.0)


def intersection_area(a: Polygon, b: Polygon) -> float:
    _require_valid(a)
    _require_valid(b)
    return _intersection_area_unchecked(a, b)


def _intersection_area_unchecked(a: Polygon, b: Polygon) -> float:
    sa, sb = a.shape, b.shape
    if not sa.intersects(sb):
        return 0.0
    inter = shapely.intersection(sa, sb).area
    return min(inter, _area_unchecked(a), _area_unchecked(b))


def union_area(a: Polygon, b: Polygon) -> float:
    return polygon_area(a) + polygon_area(b) - intersection_area(a, b)


def convex_hull(points: Iterable[Sequence[float]]) -> Polygon:
    """Andrew's monotone chain; returns a CCW polygon of input points."""
    pts = sorted({Point2(float(x), float(y)) for x, y in points})
    if len(pts) < 3:
        raise DegenerateInputError("convex hull needs at least 3 distinct points")

    def half(seq):
        chain: list[Point2] = []
        for pt in seq:
            while len(chain) >= 2 and _orient(chain[-2], chain[-1], pt) <= 0:
                chain.pop()
            chain.append(pt)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateInputError("all points are collinear")
    return Polygon(Ring(tuple(hull) + (hull[0],)))


def centroid(p: Polygon) -> Point2:
    """Area-weighted centroid, holes subtracted."""
    sx = sy = total = 0.0
    for k, ring in enumerate(p.rings):
        pts = ring.vertices
        if len(pts) < 3:
            continue
        x0, y0 = pts[0]
        a_r = cx = cy = 0.0
        for i in range(1, len(pts) - 1):
            ax, ay = pts[i].x - x0, pts[i].y - y0
            bx, by = pts[i + 1].x - x0, pts[i + 1].y - y0
            cross = ax * by - bx * ay
            a_r += cross
            cx += (ax + bx) * cross
            cy += (ay + by) * cross
        a_r *= 0.5
        if a_r == 0.0:
            continue
        sign = 1.0 if k == 0 else -1.0
        w = sign * abs(a_r)
        # triangle-fan centroid relative to the fan apex
        sx += w * (x0 + cx / (6.0 * a_r))
        sy += w * (y0 + cy / (6.0 * a_r))
        total += w
    if total <= 0.0:
        raise DegenerateInputError("centroid of a zero-area polygon")
    return Point2(sx / total, sy / total)


def bounding_envelope(geoms: Iterable[Polygon]) -> Envelope:
    xs: list[float] = []
    ys: list[float] = []
    for g in geoms:
        for pt in g.exterior.coords:
            xs.append(pt.x)
            ys.append(pt.y)
    if not xs:
        raise EmptyInputError("bounding envelope of no geometries")
    return Envelope(min(xs), min(ys), max(xs), max(ys))


def translate(p: Polygon, dx: float, dy: float) -> Polygon:
    return map_points(p, lambda q: Point2(q.x + dx, q.y + dy))


def map_points(p: Polygon, fn) -> Polygon:
    """Apply ``fn`` to every vertex, keeping ring structure."""
    return Polygon(Ring(tuple(fn(q) for q in p.exterior.coords)),
                   tuple(Ring(tuple(fn(q) for q in h.coords)) for h in p.holes))
