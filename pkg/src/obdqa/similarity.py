"""Jaccard similarity, significance filtering and per-cell aggregation."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import replace

import numpy as np
import shapely

from .errors import UndefinedScoreError
from .geometry import Polygon, _area_unchecked, intersection_area
from .hexgrid import CellStats, HexCell
from .ingest import Layer
from .overlap import OverlapPair

DEFAULT_SIGNIFICANCE = 0.51


def jaccard(a: Polygon, b: Polygon) -> float:
    """Intersection over union of two polygons, in [0, 1]."""
    if _area_unchecked(a) == 0.0 and _area_unchecked(b) == 0.0:
        raise UndefinedScoreError("Jaccard score of two zero-area polygons")
    inter = intersection_area(a, b)
    union = _area_unchecked(a) + _area_unchecked(b) - inter
    return min(max(inter / union, 0.0), 1.0)


def filter_significant(pairs: list[OverlapPair], threshold: float = DEFAULT_SIGNIFICANCE) -> list[OverlapPair]:
    """Keep pairs whose intersection covers at least ``threshold`` of the OBD polygon."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    return [p for p in pairs if p.obd_coverage >= threshold]


def dataset_avg_iou(pairs: list[OverlapPair]) -> float:
    if not pairs:
        raise UndefinedScoreError("average IoU of an empty pair list")
    return math.fsum(p.iou for p in pairs) / len(pairs)


def _stats(cell: HexCell) -> CellStats:
    return cell.stats if cell.stats is not None else CellStats()


def pair_intersections(pairs: list[OverlapPair], obd: Layer, ref: Layer) -> np.ndarray:
    """Shapely geometries of ``a ∩ b`` for every pair."""
    obd_by_id, ref_by_id = obd.by_id(), ref.by_id()
    a = [obd_by_id[p.obd_id].geometry.shape for p in pairs]
    b = [ref_by_id[p.ref_id].geometry.shape for p in pairs]
    return shapely.intersection(a, b)


def mean_iou_per_cell(pairs: list[OverlapPair], obd: Layer, ref: Layer,
                      grid: list[HexCell]) -> list[HexCell]:
    """Attach the mean full-polygon IoU of pairs whose overlap touches each cell.

    A pair belongs to cell ``h`` when ``a ∩ b ∩ h`` is non-empty; it contributes
    its whole-polygon IoU to every such cell. Cells without pairs get ``None``.
    """
    members: dict[int, list[int]] = defaultdict(list)
    if pairs and grid:
        inter = pair_intersections(pairs, obd, ref)
        tree = shapely.STRtree([c.geometry.shape for c in grid])
        pair_idx, cell_idx = tree.query(inter, predicate="intersects")
        for k in np.lexsort((pair_idx, cell_idx)):
            members[int(cell_idx[k])].append(int(pair_idx[k]))
    out = []
    for i, cell in enumerate(grid):
        idx = members.get(i, [])
        mean = math.fsum(pairs[k].iou for k in idx) / len(idx) if idx else None
        out.append(replace(cell, stats=replace(_stats(cell), mean_iou=mean, pair_count=len(idx))))
    return out


def _clipped_area_per_cell(layer: Layer, grid: list[HexCell], tree) -> np.ndarray:
    totals = np.zeros(len(grid))
    if not len(layer):
        return totals
    shapes = [fp.geometry.shape for fp in layer.footprints]
    fp_idx, cell_idx = tree.query(shapes, predicate="intersects")
    if not len(fp_idx):
        return totals
    cells = [grid[j].geometry.shape for j in cell_idx]
    areas = shapely.area(shapely.intersection([shapes[i] for i in fp_idx], cells))
    # sort so each cell's sum is accumulated in a fixed order
    order = np.lexsort((fp_idx, cell_idx))
    for k in order:
        totals[cell_idx[k]] += areas[k]
    return totals


def completeness_per_cell(obd: Layer, ref: Layer, grid: list[HexCell]) -> list[HexCell]:
    """Attach the ratio of cell-clipped OBD area to cell-clipped reference area.

    Undefined (``None``) where the cell holds no reference area; may exceed 1.
    """
    if not grid:
        return []
    tree = shapely.STRtree([c.geometry.shape for c in grid])
    obd_area = _clipped_area_per_cell(obd, grid, tree)
    ref_area = _clipped_area_per_cell(ref, grid, tree)
    out = []
    for i, cell in enumerate(grid):
        oa, ra = float(obd_area[i]), float(ref_area[i])
        comp = oa / ra if ra > 0.0 else None
        out.append(replace(cell, stats=replace(_stats(cell), completeness=comp,
                                               obd_area=oa, ref_area=ra)))
    return out


def areawide_completeness(grid: list[HexCell]) -> float | None:
    """Total clipped OBD area over total clipped reference area across the grid."""
    oa = math.fsum(_stats(c).obd_area for c in grid)
    ra = math.fsum(_stats(c).ref_area for c in grid)
    return oa / ra if ra > 0 else None
