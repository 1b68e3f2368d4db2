"""File emitters: CSV tables, hexbin GeoJSON, SVG hexbin maps, run manifests."""
from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

from .errors import UsageError
from .geometry import Point2, Polygon, Ring, map_points
from .hexgrid import CellStats, HexCell
from .ingest import write_geojson
from .projection import TmZoneSpec, forward, inverse, parse_zone

SIZE_RANK_LABELS = {10: "10th", 25: "25th", 50: "50th", 75: "75th", 90: "90th"}
OVERLAP_HIST_COLUMNS = ("Layer", "Category", "Count")
CELL_PROPERTIES = ("cell_id", "mean_iou", "pair_count", "completeness", "obd_area", "ref_area")

# viridis sampled at 10 evenly spaced stops, dark to light
VIRIDIS = ("#440154", "#482878", "#3e4a89", "#31688e", "#26828e",
           "#1f9e89", "#35b779", "#6dcd59", "#b4de2c", "#fde725")
NODATA_GREY = "#bdbdbd"


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path: str | Path, columns: Sequence[str], rows: Iterable[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row.get(c)) for c in columns])


def read_csv(path: str | Path) -> tuple[list[str], list[dict[str, str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.DictReader(fh)
        rows = list(r)
        return list(r.fieldnames or []), rows


def write_size_stats_csv(path: str | Path, per_city: dict[str, dict[float, float]]) -> None:
    """Rows are percentile ranks, one column per city."""
    cities = list(per_city)
    ranks = sorted({r for p in per_city.values() for r in p})
    rows = []
    for r in ranks:
        row = {"Percentiles": SIZE_RANK_LABELS.get(r, f"{r:g}th")}
        row.update({c: per_city[c].get(r) for c in cities})
        rows.append(row)
    write_csv(path, ["Percentiles", *cities], rows)


def write_overlap_histogram_csv(path: str | Path, counts: dict[str, int]) -> None:
    rows = [
        {"Layer": "OBD", "Category": "overlapping", "Count": counts["obd_overlapping"]},
        {"Layer": "OBD", "Category": "non_overlapping", "Count": counts["obd_non_overlapping"]},
        {"Layer": "REF", "Category": "overlapping", "Count": counts["ref_overlapping"]},
        {"Layer": "REF", "Category": "non_overlapping", "Count": counts["ref_non_overlapping"]},
    ]
    write_csv(path, OVERLAP_HIST_COLUMNS, rows)


def _cell_props(cell: HexCell) -> dict:
    s = cell.stats or CellStats()
    return {"cell_id": cell.cell_id, "mean_iou": s.mean_iou, "pair_count": s.pair_count,
            "completeness": s.completeness, "obd_area": s.obd_area, "ref_area": s.ref_area}


def grid_to_geojson(grid: list[HexCell], zone: TmZoneSpec, geographic: bool = True) -> dict:
    """One polygon feature per cell; the zone token is kept as a foreign member."""
    feats = []
    for cell in grid:
        g = cell.geometry
        if geographic:
            g = map_points(g, lambda p: Point2(*inverse(p.x, p.y, zone)))
        feats.append({"type": "Feature", "properties": _cell_props(cell),
                      "geometry": {"type": "Polygon", "coordinates": g.to_coords()}})
    return {"type": "FeatureCollection", "utm_zone": zone.token, "features": feats}


def grid_from_geojson(doc: dict, zone: TmZoneSpec | None = None) -> tuple[list[HexCell], TmZoneSpec]:
    """Rebuild cells (with stats) from :func:`grid_to_geojson` output."""
    if zone is None:
        token = doc.get("utm_zone")
        if not token:
            raise UsageError("hexbin GeoJSON carries no utm_zone; pass a zone explicitly")
        zone = parse_zone(token)
    cells = []
    for feat in doc.get("features", []):
        props = feat.get("properties") or {}
        ring = feat["geometry"]["coordinates"][0]
        pts = tuple(forward(x, y, zone) for x, y, *_ in ring)
        poly = Polygon(Ring(pts))
        cx = sum(p.x for p in pts[:-1]) / (len(pts) - 1)
        cy = sum(p.y for p in pts[:-1]) / (len(pts) - 1)
        apothem = max(p.y for p in pts) - cy
        stats = CellStats(props.get("mean_iou"), int(props.get("pair_count") or 0),
                          props.get("completeness"), float(props.get("obd_area") or 0.0),
                          float(props.get("ref_area") or 0.0))
        cells.append(HexCell(int(props["cell_id"]), Point2(cx, cy), apothem, poly, stats=stats))
    return cells, zone


def _hex_to_rgb(h: str) -> tuple[int, int, int]:
    return int(h[1:3], 16), int(h[3:5], 16), int(h[5:7], 16)


def ramp_color(t: float, ramp: Sequence[str] = VIRIDIS) -> str:
    """Linear interpolation along ``ramp`` for ``t`` in [0, 1] (clamped)."""
    t = min(1.0, max(0.0, float(t)))
    pos = t * (len(ramp) - 1)
    k = min(int(pos), len(ramp) - 2)
    f = pos - k
    a, b = _hex_to_rgb(ramp[k]), _hex_to_rgb(ramp[k + 1])
    rgb = tuple(int(round(a[i] + (b[i] - a[i]) * f)) for i in range(3))
    return "#%02x%02x%02x" % rgb


RENDERABLE = ("mean_iou", "completeness")


def render_hexbin_svg(grid: list[HexCell], attribute: str, ramp: Sequence[str] = VIRIDIS,
                      width: int = 800, title: str | None = None) -> str:
    """SVG map with one path per cell coloured by ``attribute``.

    ``mean_iou`` maps [0, 1] onto the ramp; ``completeness`` maps [0, max].
    Cells without a value are hatched grey.
    """
    if attribute not in RENDERABLE:
        raise UsageError(f"unknown attribute {attribute!r}; choose from {', '.join(RENDERABLE)}")
    if not grid:
        raise UsageError("cannot render an empty grid")
    values = [getattr(c.stats or CellStats(), attribute) for c in grid]
    defined = [v for v in values if v is not None]
    if attribute == "mean_iou":
        vmin, vmax = 0.0, 1.0
    else:
        vmin, vmax = 0.0, max(defined) if defined and max(defined) > 0 else 1.0

    xs = [p.x for c in grid for p in c.geometry.exterior.coords]
    ys = [p.y for c in grid for p in c.geometry.exterior.coords]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    scale = width / max(x1 - x0, 1e-9)
    map_h = (y1 - y0) * scale
    legend_h = 60
    height = int(round(map_h)) + legend_h

    def px(p: Point2) -> str:
        return f"{(p.x - x0) * scale:.2f},{(y1 - p.y) * scale:.2f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        "<defs>",
        '<pattern id="nodata" patternUnits="userSpaceOnUse" width="6" height="6">'
        f'<rect width="6" height="6" fill="{NODATA_GREY}"/>'
        '<path d="M0,6 L6,0" stroke="#7f7f7f" stroke-width="1"/></pattern>',
        '<linearGradient id="ramp" x1="0" x2="1" y1="0" y2="0">',
    ]
    for i, col in enumerate(ramp):
        out.append(f'<stop offset="{i / (len(ramp) - 1):.4f}" stop-color="{col}"/>')
    out += ["</linearGradient>", "</defs>"]
    if title:
        out.append(f"<title>{title}</title>")
    out.append(f'<g id="cells" data-attribute="{attribute}">')
    for cell, v in zip(grid, values):
        d = "M" + " L".join(px(p) for p in cell.geometry.exterior.vertices) + " Z"
        if v is None:
            fill, val = "url(#nodata)", "null"
        else:
            t = (v - vmin) / (vmax - vmin) if vmax > vmin else 1.0
            fill, val = ramp_color(t, ramp), repr(float(v))
        out.append(f'<path d="{d}" fill="{fill}" stroke="#ffffff" stroke-width="0.5" '
                   f'data-cell-id="{cell.cell_id}" data-value="{val}"/>')
    out.append("</g>")
    ly = int(round(map_h)) + 10
    out.append(f'<g id="legend" transform="translate(10,{ly})">')
    if defined:
        mid = 0.5 * (vmin + vmax)
        out.append('<rect x="0" y="0" width="300" height="14" fill="url(#ramp)"/>')
        for x, label in ((0, vmin), (150, mid), (300, vmax)):
            out.append(f'<text x="{x}" y="32" font-size="12" text-anchor="middle">{label:.3g}</text>')
        out.append(f'<text x="320" y="12" font-size="12">{attribute}</text>')
    else:
        out.append('<rect x="0" y="0" width="40" height="14" fill="url(#nodata)"/>')
        out.append('<text x="50" y="12" font-size="12">no data</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path: str | Path, command: str, config: dict, inputs: dict[str, str | None],
                   outputs: Iterable[Path], version: str) -> dict:
    doc = {
        "tool": "obdqa",
        "version": version,
        "command": command,
        "config": config,
        "inputs": {k: ({"path": v, "sha256": sha256_file(v)} if v else None)
                   for k, v in inputs.items()},
        "outputs": {Path(p).name: sha256_file(p) for p in sorted(outputs, key=lambda p: Path(p).name)},
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return doc


def write_hexbins(path: str | Path, grid: list[HexCell], zone: TmZoneSpec) -> None:
    write_geojson(grid_to_geojson(grid, zone), path)
