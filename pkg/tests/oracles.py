"""Slow, independent reference computations used to check the fast paths.

None of these use shapely's overlay or STR-tree code paths.
"""
from __future__ import annotations

import math
from collections import defaultdict

import numpy as np


def ring_crossings(ring: np.ndarray, ys: np.ndarray) -> list[np.ndarray]:
    """x positions where each horizontal line ``y`` crosses the closed ring."""
    a = ring
    b = np.roll(ring, -1, axis=0)
    y0, y1 = a[:, 1][None, :], b[:, 1][None, :]
    x0, x1 = a[:, 0][None, :], b[:, 0][None, :]
    yy = ys[:, None]
    hit = (y0 > yy) != (y1 > yy)
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = x0 + (yy - y0) * (x1 - x0) / (y1 - y0)
    return [np.sort(xs[i][hit[i]]) for i in range(len(ys))]


def _intervals(crossings: np.ndarray) -> list[tuple[float, float]]:
    return [(crossings[k], crossings[k + 1]) for k in range(0, len(crossings) - 1, 2)]


def _overlap_len(ia, ib) -> float:
    total = 0.0
    for a0, a1 in ia:
        for b0, b1 in ib:
            lo, hi = max(a0, b0), min(a1, b1)
            if hi > lo:
                total += hi - lo
    return total


def raster_intersection_area(ring_a, ring_b, rows: int = 4000) -> float:
    """Scanline rasterization of ``|A ∩ B|`` for two simple hole-free rings.

    Each of ``rows`` horizontal sample lines is intersected exactly in x; the
    y direction is sampled at row centres (midpoint rule).
    """
    ra = np.asarray(ring_a, dtype=float)
    rb = np.asarray(ring_b, dtype=float)
    lo = max(ra[:, 1].min(), rb[:, 1].min())
    hi = min(ra[:, 1].max(), rb[:, 1].max())
    if hi <= lo:
        return 0.0
    dy = (hi - lo) / rows
    ys = lo + (np.arange(rows) + 0.5) * dy
    ca, cb = ring_crossings(ra, ys), ring_crossings(rb, ys)
    return sum(_overlap_len(_intervals(ca[i]), _intervals(cb[i])) for i in range(rows)) * dy


def raster_area(ring, rows: int = 4000) -> float:
    r = np.asarray(ring, dtype=float)
    lo, hi = r[:, 1].min(), r[:, 1].max()
    dy = (hi - lo) / rows
    ys = lo + (np.arange(rows) + 0.5) * dy
    return sum(b - a for c in ring_crossings(r, ys) for a, b in _intervals(c)) * dy


def raster_centroid(ring, rows: int = 4000) -> tuple[float, float]:
    r = np.asarray(ring, dtype=float)
    lo, hi = r[:, 1].min(), r[:, 1].max()
    dy = (hi - lo) / rows
    ys = lo + (np.arange(rows) + 0.5) * dy
    area = mx = my = 0.0
    for y, c in zip(ys, ring_crossings(r, ys)):
        for a, b in _intervals(c):
            w = (b - a) * dy
            area += w
            mx += w * 0.5 * (a + b)
            my += w * y
    return mx / area, my / area


def rect_overlap(r1, r2) -> float:
    """Closed form overlap of axis-aligned rectangles ``(x0, y0, x1, y1)``."""
    w = max(0.0, min(r1[2], r2[2]) - max(r1[0], r2[0]))
    h = max(0.0, min(r1[3], r2[3]) - max(r1[1], r2[1]))
    return w * h


def random_star_polygon(rng: np.random.Generator, centre=(0.0, 0.0), radius: float = 1.0,
                        max_vertices: int = 10) -> list[tuple[float, float]]:
    """Simple polygon with 3..max_vertices vertices, star-shaped about ``centre``."""
    while True:
        k = int(rng.integers(3, max_vertices + 1))
        gaps = rng.uniform(0.2, 1.0, size=k)
        gaps = gaps / gaps.sum() * 2 * math.pi
        if gaps.max() >= math.pi * 0.95:
            continue
        angles = np.cumsum(gaps) + rng.uniform(0, 2 * math.pi)
        radii = radius * rng.uniform(0.4, 1.0, size=k)
        return [(centre[0] + r * math.cos(t), centre[1] + r * math.sin(t)) for r, t in zip(radii, angles)]


def point_in_convex_closed(pt, verts, tol: float = 1e-9) -> bool:
    """Point inside or on a CCW convex polygon (scaled tolerance)."""
    n = len(verts)
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        cross = (bx - ax) * (pt[1] - ay) - (by - ay) * (pt[0] - ax)
        if cross < -tol * math.hypot(bx - ax, by - ay):
            return False
    return True


def brute_force_overlap_counts(obd_polys, ref_polys, area_fn, eps: float = 1e-6):
    """All-pairs overlap with an envelope pre-check; returns pair set and counts."""
    def env(p):
        xs = [q.x for q in p.exterior.coords]
        ys = [q.y for q in p.exterior.coords]
        return min(xs), min(ys), max(xs), max(ys)

    eo = np.array([env(p) for p in obd_polys]).reshape(-1, 4)
    er = np.array([env(p) for p in ref_polys]).reshape(-1, 4)
    touching = ((eo[:, None, 0] <= er[None, :, 2]) & (er[None, :, 0] <= eo[:, None, 2])
                & (eo[:, None, 1] <= er[None, :, 3]) & (er[None, :, 1] <= eo[:, None, 3]))
    pairs = set()
    for i, j in zip(*np.nonzero(touching)):
        if area_fn(obd_polys[i], ref_polys[j]) > eps:
            pairs.add((int(i), int(j)))
    obd_partners = defaultdict(set)
    ref_partners = defaultdict(set)
    for i, j in pairs:
        obd_partners[i].add(j)
        ref_partners[j].add(i)
    n_o, n_r = len(obd_polys), len(ref_polys)
    counts = {
        "OOP": 100.0 * len(obd_partners) / n_o,
        "ORP": 100.0 * len(ref_partners) / n_r,
        "NOOP": 100.0 * (n_o - len(obd_partners)) / n_o,
        "NORP": 100.0 * (n_r - len(ref_partners)) / n_r,
        "OMO": 100.0 * sum(1 for v in obd_partners.values() if len(v) > 1) / n_o,
        "RMO": 100.0 * sum(1 for v in ref_partners.values() if len(v) > 1) / n_r,
    }
    return pairs, counts


def sort_interp_percentile(values, rank: float) -> float:
    s = sorted(float(v) for v in values)
    pos = (len(s) - 1) * rank / 100.0
    lo = int(math.floor(pos))
    hi = min(lo + 1, len(s) - 1)
    return s[lo] + (s[hi] - s[lo]) * (pos - lo)


def normal_equations_affine(src, dst):
    """Solve the stacked affine system through its normal equations."""
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)
    rows, rhs = [], []
    for (x, y), (u, v) in zip(src, dst):
        rows.append([x, y, 0, 0, 1, 0])
        rhs.append(u)
    for (x, y), (u, v) in zip(src, dst):
        rows.append([0, 0, x, y, 0, 1])
        rhs.append(v)
    D = np.array(rows)
    b = np.array(rhs)
    return np.linalg.solve(D.T @ D, D.T @ b), D, b


def hex_lattice_count(min_x, min_y, max_x, max_y, apothem: float) -> int:
    """Count flat-top lattice hexagons meeting a rectangle in positive area.

    Enumerates a generous block of lattice cells anchored at the min corner
    and tests each by clipping the hexagon against the rectangle
    (Sutherland-Hodgman) and taking the shoelace area.
    """
    R = 2 * apothem / math.sqrt(3)
    count = 0
    n_cols = int((max_x - min_x) / (1.5 * R)) + 4
    n_rows = int((max_y - min_y) / (2 * apothem)) + 4
    for col in range(-3, n_cols):
        for row in range(-3, n_rows):
            cx = min_x + col * 1.5 * R
            cy = min_y + row * 2 * apothem + (apothem if col % 2 else 0.0)
            hexv = [(cx + R * math.cos(math.radians(60 * k)), cy + R * math.sin(math.radians(60 * k)))
                    for k in range(6)]
            if _clip_area(hexv, (min_x, min_y, max_x, max_y)) > 1e-9 * apothem * apothem:
                count += 1
    return count


def _clip_area(poly, rect) -> float:
    x0, y0, x1, y1 = rect
    edges = [lambda p: p[0] >= x0, lambda p: p[0] <= x1, lambda p: p[1] >= y0, lambda p: p[1] <= y1]

    def cut(p, q, k):
        if k == 0 or k == 1:
            x = x0 if k == 0 else x1
            t = (x - p[0]) / (q[0] - p[0])
        else:
            y = y0 if k == 2 else y1
            t = (y - p[1]) / (q[1] - p[1])
        return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))

    out = list(poly)
    for k, inside in enumerate(edges):
        src, out = out, []
        for i in range(len(src)):
            p, q = src[i - 1], src[i]
            if inside(q):
                if not inside(p):
                    out.append(cut(p, q, k))
                out.append(q)
            elif inside(p):
                out.append(cut(p, q, k))
        if not out:
            return 0.0
    s = 0.0
    for i in range(len(out)):
        (ax, ay), (bx, by) = out[i - 1], out[i]
        s += ax * by - bx * ay
    return abs(s) / 2


def convex_clip(subject, clip):
    """Sutherland-Hodgman clip of ``subject`` by a CCW convex polygon ``clip``."""
    out = [tuple(p) for p in subject]
    n = len(clip)
    for i in range(n):
        ax, ay = clip[i]
        bx, by = clip[(i + 1) % n]

        def side(p):
            return (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax)

        src, out = out, []
        for k in range(len(src)):
            p, q = src[k - 1], src[k]
            sp, sq = side(p), side(q)
            if sq >= 0:
                if sp < 0:
                    t = sp / (sp - sq)
                    out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
                out.append(q)
            elif sp >= 0:
                t = sp / (sp - sq)
                out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
        if not out:
            return []
    return out


def shoelace(pts) -> float:
    # relative to the first vertex; raw UTM-sized products lose ~1e-4 m^2
    x0, y0 = pts[0]
    s = 0.0
    for i in range(len(pts)):
        (ax, ay), (bx, by) = pts[i - 1], pts[i]
        s += (ax - x0) * (by - y0) - (bx - x0) * (ay - y0)
    return abs(s) / 2


def convex_intersects(pa, pb) -> bool:
    """Closed intersection test for two convex polygons (separating axis theorem)."""
    for poly in (pa, pb):
        n = len(poly)
        for i in range(n):
            ex = poly[(i + 1) % n][0] - poly[i][0]
            ey = poly[(i + 1) % n][1] - poly[i][1]
            nx, ny = -ey, ex
            pa_proj = [nx * x + ny * y for x, y in pa]
            pb_proj = [nx * x + ny * y for x, y in pb]
            if max(pa_proj) < min(pb_proj) or max(pb_proj) < min(pa_proj):
                return False
    return True
