"""Reading building layers from GeoJSON and writing them back out."""
from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator

from shapely.geometry import Point as ShapelyPoint

from .errors import EmptyLayerError, InvalidGeometryError, UsageError
from .geometry import Envelope, Point2, Polygon, bounding_envelope, centroid, is_valid, map_points, normalize, point_in_ring
from .projection import TmZoneSpec, forward, inverse, utm_zone_for

log = logging.getLogger(__name__)


class Source(str, enum.Enum):
    OBD = "OBD"
    REF = "REF"


@dataclass(frozen=True)
class Footprint:
    id: int
    geometry: Polygon
    source: Source
    original_feature_index: int


@dataclass(frozen=True)
class Layer:
    footprints: tuple[Footprint, ...]
    zone: TmZoneSpec
    provenance: str = ""
    dropped_count: int = 0
    skipped_count: int = 0
    source: Source = Source.OBD

    def __len__(self) -> int:
        return len(self.footprints)

    def __iter__(self) -> Iterator[Footprint]:
        return iter(self.footprints)

    @property
    def geometries(self) -> list[Polygon]:
        return [f.geometry for f in self.footprints]

    def by_id(self) -> dict[int, Footprint]:
        return {f.id: f for f in self.footprints}

    def envelope(self) -> Envelope:
        return bounding_envelope(self.geometries)


def make_layer(polygons: Iterable[Polygon], source: Source | str, zone: TmZoneSpec,
               provenance: str = "") -> Layer:
    """Wrap already-projected polygons as a layer with ids 0..n-1.

    Invalid polygons are dropped and counted, as in :func:`read_layer`.
    """
    source = Source(source)
    fps = []
    dropped = 0
    for i, p in enumerate(polygons):
        p = normalize(p)
        if not is_valid(p):
            dropped += 1
            continue
        fps.append(Footprint(len(fps), p, source, i))
    return Layer(tuple(fps), zone, provenance, dropped, 0, source)


def _iter_polygon_parts(geom: dict) -> Iterator[list]:
    gtype = geom.get("type")
    if gtype == "Polygon":
        yield geom["coordinates"]
    elif gtype == "MultiPolygon":
        yield from geom["coordinates"]
    else:
        raise TypeError(gtype)


def _load_features(path: Path) -> list[dict]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError) as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc
    if doc.get("type") != "FeatureCollection":
        raise UsageError(f"{path}: expected a GeoJSON FeatureCollection")
    return doc.get("features") or []


def _looks_projected(features: list[dict]) -> bool:
    for feat in features:
        geom = feat.get("geometry") or {}
        try:
            for part in _iter_polygon_parts(geom):
                for ring in part:
                    for x, y, *_ in ring:
                        if abs(x) > 180.0 or abs(y) > 90.0:
                            return True
        except (TypeError, ValueError):
            continue
    return False


def read_layer(path: str | Path, role: Source | str, zone: TmZoneSpec,
               already_projected: bool = False) -> Layer:
    """Read a GeoJSON FeatureCollection of (Multi)Polygons into a projected layer.

    Multipolygons are exploded into one footprint per part. Ids are assigned
    0..n-1 in file order; any ``id`` in the file is ignored.
    """
    role = Source(role)
    features = _load_features(Path(path))
    if not already_projected and _looks_projected(features):
        raise UsageError(f"{path}: coordinates exceed lon/lat range; "
                         "pass already_projected for projected input")
    fps: list[Footprint] = []
    dropped = skipped = 0
    for idx, feat in enumerate(features):
        geom = feat.get("geometry") or {}
        try:
            parts = list(_iter_polygon_parts(geom))
        except TypeError:
            skipped += 1
            continue
        for part in parts:
            if not part:
                dropped += 1
                continue
            try:
                if already_projected:
                    rings = [[(float(x), float(y)) for x, y, *_ in ring] for ring in part]
                else:
                    rings = [[tuple(forward(float(x), float(y), zone)) for x, y, *_ in ring]
                             for ring in part]
                poly = normalize(Polygon.from_coords(rings[0], rings[1:]))
            except (InvalidGeometryError, ValueError, TypeError):
                dropped += 1
                continue
            if not is_valid(poly):
                dropped += 1
                continue
            fps.append(Footprint(len(fps), poly, role, idx))
    if skipped:
        log.warning("%s: skipped %d non-polygon features", path, skipped)
    if dropped:
        log.info("%s: dropped %d invalid polygons", path, dropped)
    if not fps:
        raise EmptyLayerError(f"{path}: no valid polygon features")
    return Layer(tuple(fps), zone, str(path), dropped, skipped, role)


def geographic_center(paths: Iterable[str | Path]) -> tuple[float, float]:
    """Centre of the lon/lat bounding box over all polygon vertices in ``paths``."""
    lo_x = lo_y = math.inf
    hi_x = hi_y = -math.inf
    for path in paths:
        for feat in _load_features(Path(path)):
            try:
                parts = list(_iter_polygon_parts(feat.get("geometry") or {}))
            except TypeError:
                continue
            for part in parts:
                for x, y, *_ in part[0] if part else ():
                    lo_x, hi_x = min(lo_x, x), max(hi_x, x)
                    lo_y, hi_y = min(lo_y, y), max(hi_y, y)
    if lo_x == math.inf:
        raise EmptyLayerError("no polygon vertices found to choose a projection zone")
    return (lo_x + hi_x) / 2.0, (lo_y + hi_y) / 2.0


def default_zone(paths: Iterable[str | Path]) -> TmZoneSpec:
    return utm_zone_for(*geographic_center(paths))


def clip_to_boundary(layer: Layer, boundary: Polygon) -> Layer:
    """Keep footprints whose centroid lies inside ``boundary``; geometry is not cut."""
    boundary = normalize(boundary)
    shape = boundary.shape
    kept = []
    for fp in layer.footprints:
        c = centroid(fp.geometry)
        inside = point_in_ring(c, boundary.exterior.vertices) and not any(
            point_in_ring(c, h.vertices) for h in boundary.holes)
        if inside or shape.touches(ShapelyPoint(c.x, c.y)):
            kept.append(fp)
    if not kept:
        log.warning("clip_to_boundary removed every footprint of %s", layer.provenance)
    return replace(layer, footprints=tuple(kept))


def read_boundary(path: str | Path, zone: TmZoneSpec, already_projected: bool = False) -> Polygon:
    """Largest polygon of a GeoJSON file, projected; used as the study boundary."""
    layer = read_layer(path, Source.REF, zone, already_projected)
    return max(layer.geometries, key=lambda g: g.shape.area)


def layer_to_geojson(layer: Layer, geographic: bool = True) -> dict:
    """FeatureCollection with ``id`` and ``source`` properties.

    With ``geographic`` the projected coordinates are inverted back to lon/lat.
    """
    feats = []
    for fp in layer.footprints:
        g = fp.geometry
        if geographic:
            g = map_points(g, lambda p: Point2(*inverse(p.x, p.y, layer.zone)))
        feats.append({
            "type": "Feature",
            "properties": {"id": fp.id, "source": fp.source.value},
            "geometry": {"type": "Polygon", "coordinates": g.to_coords()},
        })
    return {"type": "FeatureCollection", "features": feats}


def write_geojson(doc: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(doc, separators=(",", ":")) + "\n", encoding="utf-8")
