from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .box import BoundingBox


@dataclass(frozen=True, slots=True)
class LetterboxTransform:
    """Aspect-preserving resize into a ``target x target`` square with symmetric padding."""
    scale: float
    pad_left: int
    pad_top: int
    source_w: int
    source_h: int
    target: int
    content_w: int
    content_h: int

    @property
    def pad_right(self) -> int:
        return self.target - self.content_w - self.pad_left

    @property
    def pad_bottom(self) -> int:
        return self.target - self.content_h - self.pad_top

    def to_target(self, x: float, y: float) -> Tuple[float, float]:
        return (x * self.scale + self.pad_left, y * self.scale + self.pad_top)

    def to_source(self, x: float, y: float) -> Tuple[float, float]:
        return ((x - self.pad_left) / self.scale, (y - self.pad_top) / self.scale)

    def box_to_target(self, box: BoundingBox) -> BoundingBox:
        x0, y0 = self.to_target(box.x_min, box.y_min)
        x1, y1 = self.to_target(box.x_max, box.y_max)
        return BoundingBox(x0, y0, x1, y1)

    def box_to_source(self, box: BoundingBox) -> BoundingBox:
        x0, y0 = self.to_source(box.x_min, box.y_min)
        x1, y1 = self.to_source(box.x_max, box.y_max)
        return BoundingBox(x0, y0, x1, y1)

    def clip_to_source(self, box: BoundingBox) -> BoundingBox:
        """Clamp a source-frame box to the source image."""
        x0 = min(max(box.x_min, 0.0), self.source_w)
        y0 = min(max(box.y_min, 0.0), self.source_h)
        x1 = min(max(box.x_max, 0.0), self.source_w)
        y1 = min(max(box.y_max, 0.0), self.source_h)
        return BoundingBox(x0, y0, x1, y1)


def letterbox(source_w: int, source_h: int, target: int = 640) -> LetterboxTransform:
    """
    Compute the letterbox mapping of a ``source_w x source_h`` image.

    The long side is scaled to ``target``; when the padding on the short side
    is odd the extra pixel goes to the bottom/right.
    """
    if source_w <= 0 or source_h <= 0 or target <= 0:
        raise ValueError(f"dimensions must be positive, got {source_w}x{source_h} -> {target}")
    scale = target / max(source_w, source_h)
    content_w = min(int(round(source_w * scale)), target)
    content_h = min(int(round(source_h * scale)), target)
    return LetterboxTransform(
        scale=scale,
        pad_left=(target - content_w) // 2,
        pad_top=(target - content_h) // 2,
        source_w=source_w,
        source_h=source_h,
        target=target,
        content_w=content_w,
        content_h=content_h,
    )
