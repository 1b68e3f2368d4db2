"""Quality assessment of open building-footprint datasets against a reference layer."""

__version__ = "0.1.0"

from .assess import FootprintQualityAssessor
from .geometry import (Envelope, Point2, Polygon, Ring, bounding_envelope, centroid, convex_hull,
                       intersection_area, normalize, polygon_area, union_area, validate)
from .hexgrid import CellStats, HexCell, build_grid, join_to_cells
from .ingest import Footprint, Layer, Source, clip_to_boundary, make_layer, read_layer
from .overlap import OverlapPair, OverlapReport, find_pairs, overlap_report
from .positional import (AccuracyReport, AffineFit, AffineRegistration, MatchedVertexPair,
                         accuracy_report, bearing, fit_affine, inner_angle, match_homologous,
                         select_control_targets)
from .projection import TmZoneSpec, forward, inverse, parse_zone, utm_zone_for
from .similarity import (completeness_per_cell, dataset_avg_iou, filter_significant, jaccard,
                         mean_iou_per_cell)
from .sizestats import LogNormalSizeModel, SizeStats, histogram, log_normal_fit, pdf_curve, percentiles
from .synth import Scene, SceneConfig, apply_affine, generate_scene

__all__ = [
    "AccuracyReport", "AffineFit", "AffineRegistration", "CellStats", "Envelope", "Footprint",
    "FootprintQualityAssessor", "HexCell", "Layer", "LogNormalSizeModel", "MatchedVertexPair",
    "OverlapPair", "OverlapReport", "Point2", "Polygon", "Ring", "Scene", "SceneConfig",
    "SizeStats", "Source", "TmZoneSpec", "accuracy_report", "apply_affine", "bearing",
    "bounding_envelope", "build_grid", "centroid", "clip_to_boundary", "completeness_per_cell",
    "convex_hull", "dataset_avg_iou", "filter_significant", "find_pairs", "fit_affine", "forward",
    "generate_scene", "histogram", "inner_angle", "intersection_area", "inverse", "jaccard",
    "join_to_cells", "log_normal_fit", "make_layer", "match_homologous", "mean_iou_per_cell",
    "normalize", "overlap_report", "parse_zone", "pdf_curve", "percentiles", "polygon_area",
    "read_layer", "select_control_targets", "union_area", "utm_zone_for", "validate",
]
