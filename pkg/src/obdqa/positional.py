"""Relative positional accuracy from homologous building vertices.

Control vertices are picked near the four corners of a layer's envelope and
near the centre of the convex hull of all its vertices. Each control vertex is
matched to a vertex of the other layer with a similar inner angle and similar
incoming/outgoing bearings, and the matched pairs feed a six-parameter affine
least-squares fit plus mean angle, bearing and distance discrepancies.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .errors import (DegenerateInputError, EmptyInputError, InsufficientGeometryError,
                     RegistrationImpossibleError, SingularSystemError)
from .geometry import Point2, bounding_envelope, centroid, convex_hull
from .ingest import Layer
from ._validation import check_points

DEFAULT_MATCH_RADIUS = 5.0
DEFAULT_ANGLE_TOL = 15.0
N_CONTROL_POINTS = 5

ACCURACY_COLUMNS = ("Provider", "City", "Angle_deg", "Brg1_deg", "Brg2_deg", "Dist_m",
                    "N_matches", "Fit_error_m")


def inner_angle(p1, p2, p3) -> float:
    """Unsigned angle at ``p2`` between ``p1`` and ``p3``, degrees in [0, 180]."""
    v1x, v1y = p1[0] - p2[0], p1[1] - p2[1]
    v2x, v2y = p3[0] - p2[0], p3[1] - p2[1]
    n1, n2 = math.hypot(v1x, v1y), math.hypot(v2x, v2y)
    if n1 == 0.0 or n2 == 0.0:
        raise DegenerateInputError("inner angle with a zero-length arm")
    cos_t = (v1x * v2x + v1y * v2y) / (n1 * n2)
    return math.degrees(math.acos(min(1.0, max(-1.0, cos_t))))


def bearing(p1, p2) -> float:
    """Grid bearing from ``p1`` to ``p2``: 0 is north, clockwise, in [0, 360)."""
    dx, dy = p2[0] - p1[0], p2[1] - p1[1]
    if dx == 0.0 and dy == 0.0:
        raise DegenerateInputError("bearing between coincident points")
    b = (math.degrees(math.atan2(dx, dy)) + 360.0) % 360.0
    return 0.0 if b == 360.0 else b


def circular_diff(a: float, b: float, period: float = 360.0) -> float:
    d = abs(a - b) % period
    return min(d, period - d)


@dataclass(frozen=True)
class VertexSignature:
    theta: float
    brg_in: float
    brg_out: float


@dataclass(frozen=True)
class MatchedVertexPair:
    src: Point2
    dst: Point2
    d_theta: float
    d_brg_in: float
    d_brg_out: float
    dist: float


class VertexTable:
    """Every ring vertex of a layer with its angle/bearing signature.

    Rings follow normalized orientation (exterior CCW, holes CW), which fixes
    what "previous" and "next" mean.
    """

    def __init__(self, layer: Layer):
        xs, ys, th, bi, bo, owner = [], [], [], [], [], []
        for fp in layer.footprints:
            for ring in fp.geometry.rings:
                pts = ring.vertices
                n = len(pts)
                for k in range(n):
                    prev, cur, nxt = pts[k - 1], pts[k], pts[(k + 1) % n]
                    xs.append(cur.x)
                    ys.append(cur.y)
                    th.append(inner_angle(prev, cur, nxt))
                    bi.append(bearing(prev, cur))
                    bo.append(bearing(cur, nxt))
                    owner.append(fp.id)
        self.xy = np.column_stack([xs, ys]) if xs else np.empty((0, 2))
        self.theta = np.asarray(th)
        self.brg_in = np.asarray(bi)
        self.brg_out = np.asarray(bo)
        self.owner = np.asarray(owner, dtype=int)

    def __len__(self) -> int:
        return len(self.xy)

    def signature(self, i: int) -> VertexSignature:
        return VertexSignature(float(self.theta[i]), float(self.brg_in[i]), float(self.brg_out[i]))

    def point(self, i: int) -> Point2:
        return Point2(float(self.xy[i, 0]), float(self.xy[i, 1]))

    def nearest(self, p, exclude: np.ndarray | None = None) -> int:
        d2 = (self.xy[:, 0] - p[0]) ** 2 + (self.xy[:, 1] - p[1]) ** 2
        if exclude is not None:
            d2 = np.where(exclude, np.inf, d2)
        i = int(np.argmin(d2))
        if not np.isfinite(d2[i]):
            raise InsufficientGeometryError("no vertex left to choose")
        return i


def select_control_targets(layer: Layer) -> list[Point2]:
    """Five distinct building vertices: one per envelope corner, one at the hull centre.

    Corners are visited as (min,min), (max,min), (max,max), (min,max); the
    nearest not-yet-chosen vertex wins, ties going to the earliest vertex.
    """
    if not len(layer):
        raise EmptyInputError("control targets of an empty layer")
    table = VertexTable(layer)
    unique = np.unique(table.xy, axis=0)
    if len(unique) < N_CONTROL_POINTS:
        raise InsufficientGeometryError(
            f"layer has {len(unique)} distinct vertices; {N_CONTROL_POINTS} needed")
    env = bounding_envelope(layer.geometries)
    try:
        hull_centre = centroid(convex_hull(unique.tolist()))
    except DegenerateInputError as exc:
        raise InsufficientGeometryError(str(exc)) from exc
    taken = np.zeros(len(table), dtype=bool)
    chosen: list[Point2] = []
    for target in (*env.corners, hull_centre):
        i = table.nearest(target, exclude=taken)
        pt = table.point(i)
        chosen.append(pt)
        # exclude every copy of this coordinate (shared walls repeat vertices)
        taken |= (table.xy[:, 0] == pt.x) & (table.xy[:, 1] == pt.y)
    return chosen


def match_homologous(src: Layer, dst: Layer, targets, radius: float = DEFAULT_MATCH_RADIUS,
                     angle_tol: float = DEFAULT_ANGLE_TOL) -> list[MatchedVertexPair]:
    """Pair each target's source vertex with its nearest look-alike in ``dst``.

    A ``dst`` vertex qualifies when it lies within ``radius`` metres and its
    inner angle and both bearings differ from the source vertex by at most
    ``angle_tol`` degrees (circular differences).
    """
    s_tab, d_tab = VertexTable(src), VertexTable(dst)
    if not len(s_tab) or not len(d_tab):
        raise RegistrationImpossibleError("matching needs vertices in both layers")
    pairs: list[MatchedVertexPair] = []
    for t in targets:
        i = s_tab.nearest(t)
        s_pt = s_tab.point(i)
        dist = np.hypot(d_tab.xy[:, 0] - s_pt.x, d_tab.xy[:, 1] - s_pt.y)
        d_th = _circ(d_tab.theta, s_tab.theta[i])
        d_bi = _circ(d_tab.brg_in, s_tab.brg_in[i])
        d_bo = _circ(d_tab.brg_out, s_tab.brg_out[i])
        ok = (dist <= radius) & (d_th <= angle_tol) & (d_bi <= angle_tol) & (d_bo <= angle_tol)
        if not ok.any():
            continue
        j = int(np.argmin(np.where(ok, dist, np.inf)))
        pairs.append(MatchedVertexPair(s_pt, d_tab.point(j), float(d_th[j]), float(d_bi[j]),
                                       float(d_bo[j]), float(dist[j])))
    if len(pairs) < 3:
        raise RegistrationImpossibleError(
            f"only {len(pairs)} homologous vertices matched; an affine fit needs 3")
    if len(pairs) < len(targets):
        warnings.warn(f"only {len(pairs)} of {len(targets)} control vertices matched",
                      stacklevel=2)
    return pairs


def _circ(values: np.ndarray, ref: float) -> np.ndarray:
    d = np.abs(values - ref) % 360.0
    return np.minimum(d, 360.0 - d)


@dataclass(frozen=True)
class AffineFit:
    a: float
    b: float
    c: float
    d: float
    t_x: float
    t_y: float
    residuals: tuple[float, ...] = ()
    fit_error: float = 0.0
    std_errors: tuple[float, ...] | None = field(default=None, compare=False)

    @property
    def params(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d, self.t_x, self.t_y])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def determinant(self) -> float:
        return self.a * self.d - self.b * self.c

    def apply(self, xy) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        return xy @ self.matrix.T + np.array([self.t_x, self.t_y])

    @classmethod
    def identity(cls) -> "AffineFit":
        return cls(1.0, 0.0, 0.0, 1.0, 0.0, 0.0)


def design_matrix(src: np.ndarray) -> np.ndarray:
    """Stacked ``2n x 6`` system: rows ``[x y 0 0 1 0]`` then ``[0 0 x y 0 1]``."""
    n = len(src)
    D = np.zeros((2 * n, 6))
    D[:n, 0], D[:n, 1], D[:n, 4] = src[:, 0], src[:, 1], 1.0
    D[n:, 2], D[n:, 3], D[n:, 5] = src[:, 0], src[:, 1], 1.0
    return D


class AffineRegistration(RegressorMixin, BaseEstimator):
    """Six-parameter affine map fitted by least squares.

    ``fit(X, y)`` takes source points ``X`` and destination points ``y``, both
    ``(n, 2)``. After fitting, ``coef_`` is the 2x2 linear part, ``intercept_``
    the translation, ``residuals_`` the per-point Euclidean misfit and
    ``fit_error_`` the root of the summed squared residuals.

    Parameters
    ----------
    min_points : int
        Smallest number of correspondences accepted (3 determines the map).
    """

    def __init__(self, min_points: int = 3):
        self.min_points = min_points

    def fit(self, X, y):
        X, y = validate_data(self, X, y, multi_output=True, y_numeric=True)
        X = check_points(X)
        y = check_points(y, name="y")
        n = len(X)
        if n < max(3, self.min_points):
            raise SingularSystemError(f"affine fit needs at least {max(3, self.min_points)} points, got {n}")
        ms, md = X.mean(axis=0), y.mean(axis=0)
        Xc, yc = X - ms, y - md
        scale = float(np.abs(Xc).max()) or 1.0
        D = design_matrix(Xc / scale)
        if np.linalg.matrix_rank(D, tol=1e-10 * np.sqrt(n)) < 6:
            raise SingularSystemError("source points are collinear or coincident")
        rhs = np.concatenate([yc[:, 0], yc[:, 1]])
        p_c, *_ = np.linalg.lstsq(D, rhs, rcond=None)
        # undo scaling of the linear terms, then the centring of both point sets
        A = np.array([[p_c[0], p_c[1]], [p_c[2], p_c[3]]]) / scale
        t = np.array([p_c[4], p_c[5]]) + md - A @ ms
        self.coef_ = A
        self.intercept_ = t
        pred = X @ A.T + t
        diff = y - pred
        self.residual_vector_ = np.concatenate([diff[:, 0], diff[:, 1]])
        self.residuals_ = np.hypot(diff[:, 0], diff[:, 1])
        self.fit_error_ = float(np.sqrt(np.sum(self.residuals_ ** 2)))
        dof = 2 * n - 6
        if dof > 0:
            sigma2 = float(self.residual_vector_ @ self.residual_vector_) / dof
            cov_c = sigma2 * np.linalg.inv(D.T @ D)
            J = np.zeros((6, 6))
            J[:4, :4] = np.eye(4) / scale
            J[4] = [-ms[0] / scale, -ms[1] / scale, 0, 0, 1, 0]
            J[5] = [0, 0, -ms[0] / scale, -ms[1] / scale, 0, 1]
            cov = J @ cov_c @ J.T
            self.std_errors_ = np.sqrt(np.clip(np.diag(cov), 0.0, None))
        else:
            self.std_errors_ = np.full(6, np.nan)
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = validate_data(self, X, reset=False)
        return X @ self.coef_.T + self.intercept_

    def to_fit(self) -> AffineFit:
        check_is_fitted(self, "coef_")
        (a, b), (c, d) = self.coef_
        return AffineFit(float(a), float(b), float(c), float(d),
                         float(self.intercept_[0]), float(self.intercept_[1]),
                         tuple(float(r) for r in self.residuals_), self.fit_error_,
                         tuple(float(s) for s in self.std_errors_))


def fit_affine(pairs: list[MatchedVertexPair]) -> AffineFit:
    """Least-squares affine map taking each pair's ``src`` onto its ``dst``."""
    if len(pairs) < 3:
        raise SingularSystemError(f"affine fit needs 3 pairs, got {len(pairs)}")
    X = np.array([p.src for p in pairs], dtype=float)
    y = np.array([p.dst for p in pairs], dtype=float)
    return AffineRegistration().fit(X, y).to_fit()


@dataclass(frozen=True)
class AccuracyReport:
    mean_angle: float
    mean_brg1: float
    mean_brg2: float
    mean_dist: float
    n_matches: int
    fit_error: float | None = None

    def row(self, provider: str = "", city: str = "") -> dict[str, object]:
        return dict(zip(ACCURACY_COLUMNS, (provider, city, self.mean_angle, self.mean_brg1,
                                           self.mean_brg2, self.mean_dist, self.n_matches,
                                           self.fit_error)))


def accuracy_report(pairs: list[MatchedVertexPair], fit: AffineFit | None = None) -> AccuracyReport:
    if not pairs:
        raise EmptyInputError("accuracy report of no matched vertices")
    n = len(pairs)
    return AccuracyReport(
        mean_angle=math.fsum(abs(p.d_theta) for p in pairs) / n,
        mean_brg1=math.fsum(abs(p.d_brg_in) for p in pairs) / n,
        mean_brg2=math.fsum(abs(p.d_brg_out) for p in pairs) / n,
        mean_dist=math.fsum(p.dist for p in pairs) / n,
        n_matches=n,
        fit_error=None if fit is None else fit.fit_error,
    )
