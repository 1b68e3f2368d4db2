"""Synthetic reference/OBD layer pairs with known ground truth.

All randomness comes from one ``numpy.random.default_rng(seed)`` (PCG64)
stream, drawn in a fixed order: reference sizes and positions, then the
drop-out subset, then vertex jitter. The reference layer therefore does not
depend on the perturbation settings.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import DensityTooHighError, SingularSystemError
from .geometry import Envelope, Point2, Polygon, centroid, is_valid, map_points, normalize
from .ingest import Footprint, Layer, Source, layer_to_geojson, write_geojson
from .positional import AffineFit
from .projection import TmZoneSpec, parse_zone
from ._validation import check_fraction

MAX_ATTEMPTS_PER_BUILDING = 2000


@dataclass(frozen=True)
class SceneConfig:
    n_buildings: int = 300
    area_bounds: Envelope = Envelope(495000.0, 615000.0, 497000.0, 617000.0)
    size_mu: float = 4.7
    size_sigma: float = 0.6
    dropout: float = 0.0
    translation: tuple[float, float] = (0.0, 0.0)
    rotation: float = 0.0
    vertex_jitter_sigma: float = 0.0
    seed: int = 0
    aspect_range: tuple[float, float] = (1.0, 2.0)
    min_gap: float = 2.0
    zone: TmZoneSpec = field(default_factory=lambda: parse_zone("31N"))

    def __post_init__(self):
        if self.n_buildings < 0:
            raise ValueError("n_buildings must be >= 0")
        check_fraction(self.dropout, "dropout", low_open=False)
        if self.vertex_jitter_sigma < 0 or self.size_sigma < 0:
            raise ValueError("sigmas must be non-negative")


class Scene(NamedTuple):
    ref: Layer
    obd: Layer
    truth: dict[int, int]


def _place_rectangles(cfg: SceneConfig, rng: np.random.Generator) -> list[tuple[float, float, float, float]]:
    b = cfg.area_bounds
    boxes = np.empty((cfg.n_buildings, 4))
    placed = 0
    for _ in range(cfg.n_buildings):
        area = float(rng.lognormal(cfg.size_mu, cfg.size_sigma))
        aspect = float(rng.uniform(*cfg.aspect_range))
        w = math.sqrt(area * aspect)
        h = area / w
        if w >= b.width or h >= b.height:
            raise DensityTooHighError(f"a {w:.1f} x {h:.1f} m building does not fit the scene bounds")
        for _attempt in range(MAX_ATTEMPTS_PER_BUILDING):
            x = float(rng.uniform(b.min_x, b.max_x - w))
            y = float(rng.uniform(b.min_y, b.max_y - h))
            if placed:
                o = boxes[:placed]
                g = cfg.min_gap
                clash = ((o[:, 0] < x + w + g) & (x < o[:, 2] + g)
                         & (o[:, 1] < y + h + g) & (y < o[:, 3] + g))
                if clash.any():
                    continue
            boxes[placed] = (x, y, x + w, y + h)
            placed += 1
            break
        else:
            raise DensityTooHighError(
                f"could not place building {placed + 1} of {cfg.n_buildings}; scene too dense")
    return [tuple(map(float, r)) for r in boxes[:placed]]


def _perturb(poly: Polygon, cfg: SceneConfig, rng: np.random.Generator) -> Polygon:
    c = centroid(poly)
    th = math.radians(cfg.rotation)
    cos_t, sin_t = math.cos(th), math.sin(th)
    dx, dy = cfg.translation

    def rigid(p: Point2) -> Point2:
        x, y = p.x - c.x, p.y - c.y
        return Point2(c.x + cos_t * x - sin_t * y + dx, c.y + sin_t * x + cos_t * y + dy)

    moved = map_points(poly, rigid)
    if cfg.vertex_jitter_sigma == 0:
        return moved
    for _ in range(100):
        verts = moved.exterior.vertices
        noise = rng.normal(0.0, cfg.vertex_jitter_sigma, size=(len(verts), 2))
        pts = [Point2(v.x + nx, v.y + ny) for v, (nx, ny) in zip(verts, noise)]
        cand = normalize(Polygon.from_coords(pts))
        if is_valid(cand):
            return cand
    raise DensityTooHighError("vertex jitter keeps producing invalid polygons")


def generate_scene(cfg: SceneConfig) -> Scene:
    """Reference rectangles, a perturbed OBD copy, and the OBD-to-reference id map."""
    rng = np.random.default_rng(cfg.seed)
    boxes = _place_rectangles(cfg, rng)
    ref_polys = [Polygon.box(*bx) for bx in boxes]
    ref = Layer(tuple(Footprint(i, p, Source.REF, i) for i, p in enumerate(ref_polys)),
                cfg.zone, f"synthetic-ref(seed={cfg.seed})", source=Source.REF)
    n = len(ref_polys)
    n_drop = int(round(cfg.dropout * n))
    dropped = set(rng.choice(n, size=n_drop, replace=False).tolist()) if n_drop else set()
    fps = []
    truth = {}
    for i, poly in enumerate(ref_polys):
        if i in dropped:
            continue
        fps.append(Footprint(len(fps), _perturb(poly, cfg, rng), Source.OBD, i))
        truth[len(fps) - 1] = i
    obd = Layer(tuple(fps), cfg.zone, f"synthetic-obd(seed={cfg.seed})", source=Source.OBD)
    return Scene(ref, obd, truth)


def apply_affine(layer: Layer, params: AffineFit) -> Layer:
    """Map every vertex through ``params``; rings are re-normalized afterwards."""
    if abs(params.determinant) <= 1e-12:
        raise SingularSystemError("affine transform is singular")
    a, b, c, d, tx, ty = params.params.tolist()

    def fn(p: Point2) -> Point2:
        return Point2(a * p.x + b * p.y + tx, c * p.x + d * p.y + ty)

    fps = tuple(Footprint(fp.id, normalize(map_points(fp.geometry, fn)), fp.source,
                          fp.original_feature_index) for fp in layer.footprints)
    return Layer(fps, layer.zone, layer.provenance, layer.dropped_count,
                 layer.skipped_count, layer.source)


def write_truth_csv(truth: dict[int, int], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["obd_id", "ref_id"])
        for k in sorted(truth):
            w.writerow([k, truth[k]])


def read_truth_csv(path: str | Path) -> dict[int, int]:
    with open(path, newline="", encoding="utf-8") as fh:
        return {int(r["obd_id"]): int(r["ref_id"]) for r in csv.DictReader(fh)}


def write_scene(scene: Scene, out_dir: str | Path) -> dict[str, Path]:
    """Write ``ref.geojson``, ``obd.geojson`` (lon/lat) and ``truth.csv``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"ref": out / "ref.geojson", "obd": out / "obd.geojson", "truth": out / "truth.csv"}
    write_geojson(layer_to_geojson(scene.ref), paths["ref"])
    write_geojson(layer_to_geojson(scene.obd), paths["obd"])
    write_truth_csv(scene.truth, paths["truth"])
    return paths
