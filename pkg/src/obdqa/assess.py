"""End-to-end quality assessment of an OBD layer against a reference layer."""
from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .errors import EmptyLayerError
from .geometry import _area_unchecked
from .hexgrid import DEFAULT_MAX_CELLS, build_grid
from .ingest import Layer
from .overlap import DEFAULT_AREA_EPSILON, find_pairs, overlap_counts, overlap_report
from .positional import (DEFAULT_ANGLE_TOL, DEFAULT_MATCH_RADIUS, accuracy_report, fit_affine,
                         match_homologous, select_control_targets)
from .similarity import DEFAULT_SIGNIFICANCE, completeness_per_cell, filter_significant, mean_iou_per_cell
from .sizestats import DEFAULT_BINS, size_stats
from .synth import apply_affine
from ._validation import check_fraction


class FootprintQualityAssessor(BaseEstimator):
    """Overlap, similarity, completeness, positional and size metrics in one pass.

    ``fit(obd, ref)`` takes two projected :class:`~obdqa.ingest.Layer` objects in
    the same frame. ``transform(layer)`` applies the fitted OBD-to-reference
    affine registration to another layer.

    Parameters
    ----------
    apothem : float
        Hexagon centre-to-edge distance in metres.
    significance_threshold : float
        Minimum share of an OBD polygon a pair's intersection must cover to
        enter the per-cell mean IoU.
    use_significance_filter : bool
        Set False to aggregate every overlapping pair per cell.
    area_epsilon : float
        Intersections at or below this area (m^2) are not overlaps.
    match_radius, angle_tol : float
        Homologous-vertex search radius (m) and angle/bearing tolerance (deg).
    histogram_bins : int
        Bins for the ln-area histogram.
    max_cells : int
        Cap on the hex grid size.
    """

    def __init__(self, apothem: float = 500.0, significance_threshold: float = DEFAULT_SIGNIFICANCE,
                 use_significance_filter: bool = True, area_epsilon: float = DEFAULT_AREA_EPSILON,
                 match_radius: float = DEFAULT_MATCH_RADIUS, angle_tol: float = DEFAULT_ANGLE_TOL,
                 histogram_bins: int = DEFAULT_BINS, max_cells: int = DEFAULT_MAX_CELLS):
        self.apothem = apothem
        self.significance_threshold = significance_threshold
        self.use_significance_filter = use_significance_filter
        self.area_epsilon = area_epsilon
        self.match_radius = match_radius
        self.angle_tol = angle_tol
        self.histogram_bins = histogram_bins
        self.max_cells = max_cells

    def _check_params(self):
        if not self.apothem > 0:
            raise ValueError(f"apothem must be positive, got {self.apothem}")
        check_fraction(self.significance_threshold, "significance_threshold")
        if self.area_epsilon < 0:
            raise ValueError("area_epsilon must be non-negative")

    def fit(self, obd: Layer, ref: Layer):
        self._check_params()
        for name, layer in (("OBD", obd), ("reference", ref)):
            if not len(layer):
                raise EmptyLayerError(f"{name} layer has no footprints")
        if obd.zone != ref.zone:
            raise ValueError(f"layers use different projections: {obd.zone.token} vs {ref.zone.token}")

        self.pairs_ = find_pairs(obd, ref, self.area_epsilon)
        self.overlap_report_ = overlap_report(self.pairs_, len(obd), len(ref))
        self.overlap_counts_ = overlap_counts(self.pairs_, len(obd), len(ref))
        if self.use_significance_filter:
            self.significant_pairs_ = filter_significant(self.pairs_, self.significance_threshold)
        else:
            self.significant_pairs_ = list(self.pairs_)

        envelope = obd.envelope().union(ref.envelope())
        grid = build_grid(envelope, self.apothem, self.max_cells)
        grid = mean_iou_per_cell(self.significant_pairs_, obd, ref, grid)
        self.grid_ = completeness_per_cell(obd, ref, grid)

        self.control_targets_ = select_control_targets(obd)
        self.matches_ = match_homologous(obd, ref, self.control_targets_,
                                         self.match_radius, self.angle_tol)
        self.affine_ = fit_affine(self.matches_)
        self.accuracy_report_ = accuracy_report(self.matches_, self.affine_)

        self.size_stats_ = size_stats([_area_unchecked(g) for g in obd.geometries],
                                      bins=self.histogram_bins)
        self.zone_ = obd.zone
        return self

    def transform(self, layer: Layer) -> Layer:
        check_is_fitted(self, "affine_")
        return apply_affine(layer, self.affine_)
