"""
Axis-aligned boxes in pixel coordinates (origin top-left, y grows downward).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..utils.exceptions import InvalidBoxError


@dataclass(frozen=True, slots=True)
class BoundingBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        coords = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(c) for c in coords):
            raise InvalidBoxError(f"non-finite coordinate in {coords}")
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise InvalidBoxError(f"min corner exceeds max corner in {coords}")

    @classmethod
    def from_xywh(cls, cx: float, cy: float, w: float, h: float) -> "BoundingBox":
        """Build from center and size."""
        return cls(cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Tuple[float, float]:
        return ((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2)

    def contains_point(self, x: float, y: float) -> bool:
        """Closed containment test."""
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def translate(self, dx: float, dy: float) -> "BoundingBox":
        return BoundingBox(self.x_min + dx, self.y_min + dy, self.x_max + dx, self.y_max + dy)

    def mirror_x(self, image_w: float) -> "BoundingBox":
        """Reflect about the vertical midline of an image ``image_w`` wide."""
        return BoundingBox(image_w - self.x_max, self.y_min, image_w - self.x_min, self.y_max)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)


def box_iou(a: BoundingBox, b: BoundingBox) -> float:
    """
    Intersection over union of two boxes.

    Returns 0.0 when either box is degenerate (zero area), including a
    degenerate box compared with itself.
    """
    if a.area <= 0 or b.area <= 0:
        return 0.0
    iw = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    ih = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def boxes_to_array(boxes: Sequence[BoundingBox]) -> np.ndarray:
    """Stack boxes into an ``(N, 4)`` float64 array."""
    if not boxes:
        return np.zeros((0, 4), dtype=np.float64)
    return np.array([b.as_tuple() for b in boxes], dtype=np.float64)


def box_iou_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Pairwise IoU between ``(N, 4)`` and ``(M, 4)`` xyxy arrays.

    Same arithmetic and degenerate-box rule as :func:`box_iou`, so
    ``box_iou_matrix(...)[i, j] == box_iou(a[i], b[j])`` bit for bit.
    """
    a = np.asarray(a, dtype=np.float64).reshape(-1, 4)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 4)
    area_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    area_b = (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])

    iw = np.minimum(a[:, None, 2], b[None, :, 2]) - np.maximum(a[:, None, 0], b[None, :, 0])
    ih = np.minimum(a[:, None, 3], b[None, :, 3]) - np.maximum(a[:, None, 1], b[None, :, 1])
    overlapping = (iw > 0) & (ih > 0)
    valid = overlapping & (area_a[:, None] > 0) & (area_b[None, :] > 0)
    inter = np.where(valid, iw * ih, 0.0)
    union = area_a[:, None] + area_b[None, :] - inter
    out = np.zeros(inter.shape, dtype=np.float64)
    np.divide(inter, union, out=out, where=valid)
    return out
