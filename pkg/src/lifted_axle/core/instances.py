"""
Ground-truth instances and model detections shared by every stage.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from ..geometry import BoundingBox, PolygonMask

Geometry = Union[BoundingBox, PolygonMask]


@dataclass(frozen=True, slots=True)
class GroundTruthInstance:
    class_id: int
    geometry: Geometry
    image_id: str = ""

    def __post_init__(self):
        if not isinstance(self.geometry, (BoundingBox, PolygonMask)):
            raise TypeError(f"geometry must be a BoundingBox or PolygonMask, got {type(self.geometry).__name__}")

    @property
    def box(self) -> BoundingBox:
        if isinstance(self.geometry, PolygonMask):
            return self.geometry.bounding_box()
        return self.geometry

    @property
    def mask(self) -> Optional[PolygonMask]:
        return self.geometry if isinstance(self.geometry, PolygonMask) else None


@dataclass(frozen=True, slots=True)
class Detection:
    class_id: int
    box: BoundingBox
    confidence: float
    image_id: str = ""
    mask: Optional[PolygonMask] = None

    def __post_init__(self):
        if not (math.isfinite(self.confidence) and 0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence must lie in [0, 1], got {self.confidence}")

    def with_confidence(self, confidence: float) -> "Detection":
        return Detection(self.class_id, self.box, confidence, self.image_id, self.mask)

    def mirror_x(self, image_w: float) -> "Detection":
        mask = self.mask.mirror_x(image_w) if self.mask is not None else None
        return Detection(self.class_id, self.box.mirror_x(image_w), self.confidence, self.image_id, mask)
