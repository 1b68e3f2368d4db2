"""Pairwise overlap discovery and the overlap cardinality report."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
import shapely

from .errors import UndefinedPercentageError
from .geometry import _area_unchecked
from .ingest import Layer

DEFAULT_AREA_EPSILON = 1e-6

REPORT_COLUMNS = ("Total_OBD", "Total_Ref", "OOP", "ORP", "NOOP", "NORP", "OMO", "RMO", "Avg_IoU")


@dataclass(frozen=True)
class OverlapPair:
    obd_id: int
    ref_id: int
    intersection: float
    union: float
    iou: float
    obd_coverage: float


@dataclass(frozen=True)
class OverlapReport:
    total_obd: int
    total_ref: int
    oop_pct: float
    orp_pct: float
    noop_pct: float
    norp_pct: float
    omo_pct: float
    rmo_pct: float
    avg_iou: float
    avg_iou_defined: bool = True

    def row(self) -> dict[str, object]:
        """The report as a CSV row keyed by :data:`REPORT_COLUMNS`."""
        vals = (self.total_obd, self.total_ref, self.oop_pct, self.orp_pct, self.noop_pct,
                self.norp_pct, self.omo_pct, self.rmo_pct,
                self.avg_iou if self.avg_iou_defined else None)
        return dict(zip(REPORT_COLUMNS, vals))


def _candidate_pairs(obd: Layer, ref: Layer) -> tuple[np.ndarray, np.ndarray]:
    if not len(obd) or not len(ref):
        empty = np.empty(0, dtype=np.intp)
        return empty, empty
    tree = shapely.STRtree([fp.geometry.shape for fp in ref.footprints])
    obd_idx, ref_idx = tree.query([fp.geometry.shape for fp in obd.footprints])
    order = np.lexsort((ref_idx, obd_idx))
    return obd_idx[order], ref_idx[order]


def find_pairs(obd: Layer, ref: Layer, area_epsilon: float = DEFAULT_AREA_EPSILON) -> list[OverlapPair]:
    """All (OBD, reference) pairs whose intersection area exceeds ``area_epsilon``.

    Envelope candidates from an STR-tree are confirmed with an exact overlay.
    Output is sorted by ``(obd_id, ref_id)``.
    """
    obd_idx, ref_idx = _candidate_pairs(obd, ref)
    if not len(obd_idx):
        return []
    a_shapes = [obd.footprints[i].geometry.shape for i in obd_idx]
    b_shapes = [ref.footprints[j].geometry.shape for j in ref_idx]
    inter = shapely.area(shapely.intersection(a_shapes, b_shapes))
    obd_area = {}
    ref_area = {}
    pairs = []
    for i, j, ia in zip(obd_idx, ref_idx, inter):
        if not ia > area_epsilon:
            continue
        fa, fb = obd.footprints[i], ref.footprints[j]
        if i not in obd_area:
            obd_area[i] = _area_unchecked(fa.geometry)
        if j not in ref_area:
            ref_area[j] = _area_unchecked(fb.geometry)
        aa, ab = obd_area[i], ref_area[j]
        ia = min(float(ia), aa, ab)
        union = aa + ab - ia
        pairs.append(OverlapPair(fa.id, fb.id, ia, union, ia / union, ia / aa))
    return pairs


def _pct(count: int, total: int) -> float:
    return 100.0 * count / total


def overlap_report(pairs: list[OverlapPair], total_obd: int, total_ref: int) -> OverlapReport:
    """Overlap percentages by distinct-id counting.

    A building overlapped by several counterparts counts once towards OOP/ORP
    and once towards OMO/RMO. All percentages are true percentages (0-100).
    """
    if total_obd <= 0 or total_ref <= 0:
        raise UndefinedPercentageError("overlap percentages need non-zero layer totals")
    partners_of_obd: dict[int, set[int]] = defaultdict(set)
    partners_of_ref: dict[int, set[int]] = defaultdict(set)
    for p in pairs:
        partners_of_obd[p.obd_id].add(p.ref_id)
        partners_of_ref[p.ref_id].add(p.obd_id)
    n_obd, n_ref = len(partners_of_obd), len(partners_of_ref)
    if n_obd > total_obd or n_ref > total_ref:
        raise ValueError("layer totals smaller than the ids present in pairs")
    multi_obd = sum(1 for s in partners_of_obd.values() if len(s) >= 2)
    multi_ref = sum(1 for s in partners_of_ref.values() if len(s) >= 2)
    oop, orp = _pct(n_obd, total_obd), _pct(n_ref, total_ref)
    if pairs:
        avg_iou = math.fsum(p.iou for p in pairs) / len(pairs)
    else:
        avg_iou = 0.0
    return OverlapReport(
        total_obd=total_obd, total_ref=total_ref,
        oop_pct=oop, orp_pct=orp,
        noop_pct=_pct(total_obd - n_obd, total_obd),
        norp_pct=_pct(total_ref - n_ref, total_ref),
        omo_pct=_pct(multi_obd, total_obd), rmo_pct=_pct(multi_ref, total_ref),
        avg_iou=avg_iou, avg_iou_defined=bool(pairs),
    )


def overlap_counts(pairs: list[OverlapPair], total_obd: int, total_ref: int) -> dict[str, int]:
    """Overlapping/non-overlapping building counts for both layers."""
    n_obd = len({p.obd_id for p in pairs})
    n_ref = len({p.ref_id for p in pairs})
    return {
        "obd_overlapping": n_obd, "obd_non_overlapping": total_obd - n_obd,
        "ref_overlapping": n_ref, "ref_non_overlapping": total_ref - n_ref,
    }
