"""Flat-top hexagonal analysis grid and footprint-to-cell spatial join."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.geometry import box as shapely_box

from .errors import DegenerateInputError, GridTooFineError
from .geometry import Envelope, Point2, Polygon, Ring
from .ingest import Layer

DEFAULT_MAX_CELLS = 10_000_000
SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class CellStats:
    mean_iou: float | None = None
    pair_count: int = 0
    completeness: float | None = None
    obd_area: float = 0.0
    ref_area: float = 0.0


@dataclass(frozen=True)
class HexCell:
    cell_id: int
    center: Point2
    apothem: float
    geometry: Polygon
    col: int = 0
    row: int = 0
    stats: CellStats | None = field(default=None, compare=False)

    @property
    def area(self) -> float:
        return 2.0 * SQRT3 * self.apothem ** 2


def hexagon_area(apothem: float) -> float:
    return 2.0 * SQRT3 * apothem * apothem


def _cell_geometry(x0: float, y0: float, half_r: float, a: float, col: int, row: int) -> tuple[Point2, Polygon]:
    # vertex x = x0 + k*half_r and y = y0 + m*a with integer k, m, so shared
    # vertices of neighbouring cells are bit-identical
    k = 3 * col
    m = 2 * row + (col & 1)
    xs = [x0 + (k + dk) * half_r for dk in (2, 1, -1, -2, -1, 1)]
    ys = [y0 + (m + dm) * a for dm in (0, 1, 1, 0, -1, -1)]
    pts = tuple(Point2(x, y) for x, y in zip(xs, ys))
    return Point2(x0 + k * half_r, y0 + m * a), Polygon(Ring(pts + (pts[0],)))


def build_grid(envelope: Envelope, apothem: float, max_cells: int = DEFAULT_MAX_CELLS) -> list[HexCell]:
    """Hexagons anchored at the envelope's min corner, covering it entirely.

    Cell ``(col=0, row=0)`` is centred on ``(min_x, min_y)``; odd columns are
    shifted up by one apothem. Ids run row-major (row, then column).
    """
    if not apothem > 0 or not math.isfinite(apothem):
        raise ValueError(f"apothem must be positive, got {apothem}")
    if envelope.width <= 0 and envelope.height <= 0:
        raise DegenerateInputError("envelope has zero extent")
    a = float(apothem)
    half_r = a / SQRT3  # half the circumradius
    col_step = 3.0 * half_r
    n_cols = int(math.ceil(envelope.width / col_step)) + 3
    n_rows = int(math.ceil(envelope.height / (2.0 * a))) + 3
    if n_cols * n_rows > max_cells:
        raise GridTooFineError(
            f"apothem {a} m needs about {n_cols * n_rows} cells (cap {max_cells})")

    x0, y0 = envelope.min_x, envelope.min_y
    env_box = shapely_box(*envelope.as_tuple())
    flat = envelope.width <= 0 or envelope.height <= 0
    kept: list[tuple[int, int, Point2, Polygon]] = []
    for row in range(-1, n_rows - 1):
        for col in range(-1, n_cols - 1):
            center, poly = _cell_geometry(x0, y0, half_r, a, col, row)
            lo_x, hi_x = center.x - 2 * half_r, center.x + 2 * half_r
            lo_y, hi_y = center.y - a, center.y + a
            if hi_x < envelope.min_x or lo_x > envelope.max_x or hi_y < envelope.min_y or lo_y > envelope.max_y:
                continue
            inner = (lo_x >= envelope.min_x and hi_x <= envelope.max_x
                     and lo_y >= envelope.min_y and hi_y <= envelope.max_y)
            if not inner:
                if flat:
                    if not poly.shape.intersects(env_box):
                        continue
                elif shapely.intersection(poly.shape, env_box).area <= 0.0:
                    continue
            kept.append((row, col, center, poly))
    return [HexCell(i, c, a, p, col=col, row=row) for i, (row, col, c, p) in enumerate(kept)]


def grid_cell_count(envelope: Envelope, apothem: float) -> int:
    """Number of cells :func:`build_grid` would emit."""
    return len(build_grid(envelope, apothem))


def _cell_tree(grid: list[HexCell]):
    return shapely.STRtree([c.geometry.shape for c in grid])


def join_to_cells(layer: Layer, grid: list[HexCell]) -> dict[int, list[int]]:
    """Map every cell id to the ids of footprints whose geometry intersects it.

    Intersection is closed: a building touching a shared edge is listed under
    both cells.
    """
    out: dict[int, list[int]] = {c.cell_id: [] for c in grid}
    if not grid or not len(layer):
        return out
    tree = _cell_tree(grid)
    shapes = [fp.geometry.shape for fp in layer.footprints]
    fp_idx, cell_idx = tree.query(shapes, predicate="intersects")
    order = np.lexsort((fp_idx, cell_idx))
    for k in order:
        out[grid[cell_idx[k]].cell_id].append(layer.footprints[fp_idx[k]].id)
    return out
