"""Command-line entry point: ``obdqa assess | synth | grid | render``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .assess import FootprintQualityAssessor
from .errors import OBDQAError, UsageError
from .geometry import Envelope
from .hexgrid import DEFAULT_MAX_CELLS, build_grid
from .ingest import Source, clip_to_boundary, default_zone, read_boundary, read_layer, write_geojson
from .overlap import DEFAULT_AREA_EPSILON, REPORT_COLUMNS
from .positional import ACCURACY_COLUMNS, DEFAULT_ANGLE_TOL, DEFAULT_MATCH_RADIUS
from .projection import parse_zone
from .report import (grid_from_geojson, grid_to_geojson, render_hexbin_svg, sha256_file,
                     write_csv, write_hexbins, write_manifest, write_overlap_histogram_csv,
                     write_size_stats_csv)
from .similarity import DEFAULT_SIGNIFICANCE
from .sizestats import HISTOGRAM_COLUMNS
from .synth import SceneConfig, generate_scene, write_scene

log = logging.getLogger("obdqa")

ASSESS_OUTPUTS = ("overlap_report.csv", "accuracy_report.csv", "size_stats.csv",
                  "size_histogram.csv", "hexbins.geojson", "hexbin_iou.svg",
                  "hexbin_completeness.svg", "overlap_histogram.csv")
OVERLAP_CSV_COLUMNS = ("City", "Provider", *REPORT_COLUMNS)


def read_config(path: str | Path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; keys use flag names."""
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key.lstrip("-").replace("-", "_")] = value.strip("\"'")
    return cfg


def _truthy(v) -> bool:
    if isinstance(v, bool):
        return v
    return str(v).strip().lower() in ("1", "true", "yes", "on")


def _apply_defaults(parser: argparse.ArgumentParser, values: dict) -> None:
    known = {a.dest: a for a in parser._actions}
    unknown = sorted(set(values) - set(known))
    if unknown:
        raise UsageError(f"unknown configuration keys: {', '.join(unknown)}")
    fixed = {}
    for k, v in values.items():
        if isinstance(known[k], (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            v = _truthy(v)
        fixed[k] = v
    parser.set_defaults(**fixed)


def _add_assess(sub):
    p = sub.add_parser("assess", help="compare an OBD layer with a reference layer")
    p.add_argument("--obd", dest="obd_path", help="OBD GeoJSON (lon/lat)")
    p.add_argument("--ref", dest="ref_path", help="reference GeoJSON (lon/lat)")
    p.add_argument("--boundary", dest="boundary_path", help="study-area boundary GeoJSON")
    p.add_argument("--utm-zone", help="projection zone such as 37S; default from data centre")
    p.add_argument("--apothem", type=float, default=500.0, help="hexagon apothem in metres")
    p.add_argument("--significance-threshold", type=float, default=DEFAULT_SIGNIFICANCE)
    p.add_argument("--no-significance-filter", action="store_true")
    p.add_argument("--match-radius", type=float, default=DEFAULT_MATCH_RADIUS)
    p.add_argument("--angle-tol", type=float, default=DEFAULT_ANGLE_TOL)
    p.add_argument("--area-epsilon", type=float, default=DEFAULT_AREA_EPSILON)
    p.add_argument("--histogram-bins", type=int, default=50)
    p.add_argument("--max-cells", type=int, default=DEFAULT_MAX_CELLS)
    p.add_argument("--city", default="study_area")
    p.add_argument("--provider", default="OBD")
    p.add_argument("--already-projected", action="store_true",
                   help="inputs are already in the projected zone (metres)")
    p.add_argument("-o", "--output-dir", required=False)
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    p.add_argument("--manifest", help="re-run the configuration recorded in a manifest.json")
    p.set_defaults(func=cmd_assess)
    return p


def _add_synth(sub):
    p = sub.add_parser("synth", help="write a synthetic scene with known ground truth")
    p.add_argument("-o", "--output-dir", required=False)
    p.add_argument("--n-buildings", type=int, default=300)
    p.add_argument("--bounds", help="min_x,min_y,max_x,max_y in projected metres")
    p.add_argument("--utm-zone", default="31N")
    p.add_argument("--size-mu", type=float, default=4.7)
    p.add_argument("--size-sigma", type=float, default=0.6)
    p.add_argument("--dropout", type=float, default=0.0)
    p.add_argument("--dx", type=float, default=0.0)
    p.add_argument("--dy", type=float, default=0.0)
    p.add_argument("--rotation", type=float, default=0.0, help="degrees about each centroid")
    p.add_argument("--jitter", type=float, default=0.0, help="vertex jitter sigma in metres")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_synth)
    return p


def _add_grid(sub):
    p = sub.add_parser("grid", help="export the hexagonal analysis grid as GeoJSON")
    p.add_argument("--obd", dest="obd_path")
    p.add_argument("--ref", dest="ref_path")
    p.add_argument("--bounds", help="min_x,min_y,max_x,max_y in projected metres")
    p.add_argument("--utm-zone")
    p.add_argument("--apothem", type=float, default=500.0)
    p.add_argument("--max-cells", type=int, default=DEFAULT_MAX_CELLS)
    p.add_argument("-o", "--output", required=False)
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_grid)
    return p


def _add_render(sub):
    p = sub.add_parser("render", help="render hexbins.geojson as an SVG map")
    p.add_argument("--hexbins", required=False)
    p.add_argument("--attribute", default="mean_iou")
    p.add_argument("-o", "--output", required=False)
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_render)
    return p


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="obdqa", description=__doc__)
    parser.add_argument("--version", action="version", version=f"obdqa {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {"assess": _add_assess(sub), "synth": _add_synth(sub),
            "grid": _add_grid(sub), "render": _add_render(sub)}
    return parser, subs


def _require(args, *names):
    missing = [n for n in names if not getattr(args, n, None)]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join(
            "--" + n.replace("_path", "").replace("_", "-") for n in missing))


def _parse_bounds(text: str) -> Envelope:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        vals = []
    if len(vals) != 4:
        raise UsageError(f"bounds must be min_x,min_y,max_x,max_y, got {text!r}")
    return Envelope(*vals)


ASSESS_CONFIG_KEYS = ("utm_zone", "apothem", "significance_threshold", "no_significance_filter",
                      "match_radius", "angle_tol", "area_epsilon", "histogram_bins", "max_cells",
                      "city", "provider", "already_projected")


def cmd_assess(args) -> int:
    _require(args, "obd_path", "ref_path", "output_dir")
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    inputs = [args.obd_path, args.ref_path] + ([args.boundary_path] if args.boundary_path else [])
    zone = parse_zone(args.utm_zone) if args.utm_zone else default_zone(inputs[:2])
    obd = read_layer(args.obd_path, Source.OBD, zone, args.already_projected)
    ref = read_layer(args.ref_path, Source.REF, zone, args.already_projected)
    if args.boundary_path:
        boundary = read_boundary(args.boundary_path, zone, args.already_projected)
        obd, ref = clip_to_boundary(obd, boundary), clip_to_boundary(ref, boundary)
    log.info("OBD %d footprints (%d dropped), REF %d footprints (%d dropped), zone %s",
             len(obd), obd.dropped_count, len(ref), ref.dropped_count, zone.token)

    model = FootprintQualityAssessor(
        apothem=args.apothem, significance_threshold=args.significance_threshold,
        use_significance_filter=not args.no_significance_filter, area_epsilon=args.area_epsilon,
        match_radius=args.match_radius, angle_tol=args.angle_tol,
        histogram_bins=args.histogram_bins, max_cells=args.max_cells,
    ).fit(obd, ref)

    ov = {"City": args.city, "Provider": args.provider, **model.overlap_report_.row()}
    write_csv(out / "overlap_report.csv", OVERLAP_CSV_COLUMNS, [ov])
    write_csv(out / "accuracy_report.csv", ACCURACY_COLUMNS,
              [model.accuracy_report_.row(args.provider, args.city)])
    write_size_stats_csv(out / "size_stats.csv", {args.city: model.size_stats_.percentiles})
    write_csv(out / "size_histogram.csv", HISTOGRAM_COLUMNS, model.size_stats_.histogram_rows())
    write_hexbins(out / "hexbins.geojson", model.grid_, zone)
    title = f"{args.city} {args.provider}"
    (out / "hexbin_iou.svg").write_text(
        render_hexbin_svg(model.grid_, "mean_iou", title=f"{title} mean IoU"), encoding="utf-8")
    (out / "hexbin_completeness.svg").write_text(
        render_hexbin_svg(model.grid_, "completeness", title=f"{title} completeness"), encoding="utf-8")
    write_overlap_histogram_csv(out / "overlap_histogram.csv", model.overlap_counts_)

    config = {k: getattr(args, k) for k in ASSESS_CONFIG_KEYS}
    config["utm_zone"] = zone.token
    write_manifest(out / "manifest.json", "assess", config,
                   {"obd": args.obd_path, "ref": args.ref_path, "boundary": args.boundary_path},
                   [out / name for name in ASSESS_OUTPUTS], __version__)
    return 0


def _manifest_defaults(path: str) -> dict:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("command") != "assess":
        raise UsageError(f"{path} is not an assess manifest")
    values = dict(doc.get("config", {}))
    for key, dest in (("obd", "obd_path"), ("ref", "ref_path"), ("boundary", "boundary_path")):
        entry = (doc.get("inputs") or {}).get(key)
        if entry:
            if Path(entry["path"]).exists() and sha256_file(entry["path"]) != entry["sha256"]:
                raise UsageError(f"input {entry['path']} changed since the manifest was written")
            values[dest] = entry["path"]
    return values


def cmd_synth(args) -> int:
    _require(args, "output_dir")
    kw = {}
    if args.bounds:
        kw["area_bounds"] = _parse_bounds(args.bounds)
    cfg = SceneConfig(n_buildings=args.n_buildings, size_mu=args.size_mu, size_sigma=args.size_sigma,
                      dropout=args.dropout, translation=(args.dx, args.dy), rotation=args.rotation,
                      vertex_jitter_sigma=args.jitter, seed=args.seed,
                      zone=parse_zone(args.utm_zone), **kw)
    scene = generate_scene(cfg)
    write_scene(scene, args.output_dir)
    log.info("wrote %d reference and %d OBD buildings to %s", len(scene.ref), len(scene.obd),
             args.output_dir)
    return 0


def cmd_grid(args) -> int:
    _require(args, "output")
    if args.bounds:
        if not args.utm_zone:
            raise UsageError("--bounds needs --utm-zone")
        zone = parse_zone(args.utm_zone)
        env = _parse_bounds(args.bounds)
    else:
        paths = [p for p in (args.obd_path, args.ref_path) if p]
        if not paths:
            raise UsageError("give --bounds or at least one of --obd/--ref")
        zone = parse_zone(args.utm_zone) if args.utm_zone else default_zone(paths)
        envs = [read_layer(p, Source.REF, zone).envelope() for p in paths]
        env = envs[0]
        for e in envs[1:]:
            env = env.union(e)
    grid = build_grid(env, args.apothem, args.max_cells)
    write_geojson(grid_to_geojson(grid, zone), args.output)
    return 0


def cmd_render(args) -> int:
    _require(args, "hexbins", "output")
    doc = json.loads(Path(args.hexbins).read_text(encoding="utf-8"))
    grid, _zone = grid_from_geojson(doc)
    Path(args.output).write_text(render_hexbin_svg(grid, args.attribute), encoding="utf-8")
    return 0


def _error_line(exc: BaseException) -> str:
    code = getattr(exc, "code", None) if isinstance(exc, OBDQAError) else None
    if code is None:
        code = "io" if isinstance(exc, OSError) else "invalid-value"
    return json.dumps({"error": code, "type": type(exc).__name__, "message": str(exc)})


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        pre, _ = parser.parse_known_args(argv)
        sp = subs[pre.command]
        if getattr(pre, "config", None):
            _apply_defaults(sp, read_config(pre.config))
        if getattr(pre, "manifest", None):
            _apply_defaults(sp, _manifest_defaults(pre.manifest))
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except UsageError as exc:
        print(_error_line(exc), file=sys.stderr)
        return 2
    except (OBDQAError, OSError, ValueError) as exc:
        print(_error_line(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
