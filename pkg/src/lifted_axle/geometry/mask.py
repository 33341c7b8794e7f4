"""
Polygon instance masks and their rasterization.

A cell ``(i, j)`` of a ``height x width`` grid is set when its center
``(j + 0.5, i + 0.5)`` lies inside the polygon under the even-odd rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..utils.exceptions import InvalidPolygonError
from .box import BoundingBox

BitGrid = np.ndarray


@dataclass(frozen=True, slots=True)
class PolygonMask:
    vertices: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise InvalidPolygonError(f"{len(verts)} vertices, at least 3 required")
        for x, y in verts:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise InvalidPolygonError(f"non-finite vertex ({x}, {y})")
            if x < 0 or y < 0:
                raise InvalidPolygonError(f"negative vertex ({x}, {y})")

    @classmethod
    def from_box(cls, box: BoundingBox) -> "PolygonMask":
        return cls(((box.x_min, box.y_min), (box.x_max, box.y_min),
                    (box.x_max, box.y_max), (box.x_min, box.y_max)))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=np.float64)

    def bounding_box(self) -> BoundingBox:
        pts = self.as_array()
        return BoundingBox(float(pts[:, 0].min()), float(pts[:, 1].min()),
                           float(pts[:, 0].max()), float(pts[:, 1].max()))

    def area(self) -> float:
        """Shoelace area."""
        pts = self.as_array()
        x, y = pts[:, 0], pts[:, 1]
        return float(abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))) * 0.5)

    def translate(self, dx: float, dy: float) -> "PolygonMask":
        return PolygonMask(tuple((x + dx, y + dy) for x, y in self.vertices))

    def mirror_x(self, image_w: float) -> "PolygonMask":
        return PolygonMask(tuple((image_w - x, y) for x, y in self.vertices))


def rasterize_polygon(poly: PolygonMask | Sequence[Tuple[float, float]], width: int, height: int) -> BitGrid:
    """
    Rasterize ``poly`` onto a ``(height, width)`` boolean grid.

    Parts of the polygon outside the grid are clipped. Only the rows and
    columns spanned by the polygon's bounding box are tested.
    """
    if width <= 0 or height <= 0:
        raise ValueError(f"grid dimensions must be positive, got {width}x{height}")
    if not isinstance(poly, PolygonMask):
        poly = PolygonMask(tuple(poly))
    grid = np.zeros((height, width), dtype=bool)
    pts = poly.as_array()

    # cells whose centers can fall inside the bounding box
    j0 = max(int(math.floor(pts[:, 0].min() - 0.5)), 0)
    j1 = min(int(math.ceil(pts[:, 0].max() - 0.5)) + 1, width)
    i0 = max(int(math.floor(pts[:, 1].min() - 0.5)), 0)
    i1 = min(int(math.ceil(pts[:, 1].max() - 0.5)) + 1, height)
    if j0 >= j1 or i0 >= i1:
        return grid

    px = np.arange(j0, j1, dtype=np.float64) + 0.5
    py = np.arange(i0, i1, dtype=np.float64) + 0.5
    inside = np.zeros((i1 - i0, j1 - j0), dtype=bool)

    xs, ys = pts[:, 0], pts[:, 1]
    xe, ye = np.roll(xs, -1), np.roll(ys, -1)
    for x1, y1, x2, y2 in zip(xs, ys, xe, ye):
        if y1 == y2:
            continue
        crosses = (y1 > py) != (y2 > py)
        if not crosses.any():
            continue
        x_at = x1 + (py[crosses] - y1) * (x2 - x1) / (y2 - y1)
        inside[crosses] ^= px[None, :] < x_at[:, None]

    grid[i0:i1, j0:j1] = inside
    return grid


def grid_iou(a: BitGrid, b: BitGrid) -> float:
    union = np.count_nonzero(a | b)
    if union == 0:
        return 0.0
    return np.count_nonzero(a & b) / union


def mask_iou(a: PolygonMask, b: PolygonMask, width: int, height: int) -> float:
    """IoU of two polygons rasterized at ``width x height``."""
    return grid_iou(rasterize_polygon(a, width, height), rasterize_polygon(b, width, height))


def mask_iou_matrix(a: Sequence[PolygonMask], b: Sequence[PolygonMask], width: int, height: int) -> np.ndarray:
    """Pairwise mask IoU; each polygon is rasterized once."""
    grids_a = [rasterize_polygon(p, width, height).ravel() for p in a]
    grids_b = [rasterize_polygon(p, width, height).ravel() for p in b]
    out = np.zeros((len(grids_a), len(grids_b)), dtype=np.float64)
    if not grids_a or not grids_b:
        return out
    stack_a = np.stack(grids_a).astype(np.float64)
    stack_b = np.stack(grids_b).astype(np.float64)
    inter = stack_a @ stack_b.T
    union = stack_a.sum(axis=1)[:, None] + stack_b.sum(axis=1)[None, :] - inter
    np.divide(inter, union, out=out, where=union > 0)
    return out
