"""
YOLO-style label files: one instance per line, whitespace separated,
coordinates normalized to [0, 1].

    detection:     <class> <cx> <cy> <w> <h>
    segmentation:  <class> <x1> <y1> <x2> <y2> ... <xk> <yk>
"""
from abc import ABC, abstractmethod
from typing import Dict, List, Mapping, Optional, Sequence
import logging

from ..core import GroundTruthInstance, TRUCK_AXLE_CLASSES, LIFTED_AXLE_CLASSES
from ..geometry import BoundingBox, PolygonMask
from ..utils.exceptions import LabelParseError, LabelSerializationError, InvalidPolygonError

annotations_log = logging.getLogger('annotations')

_BOUNDS_EPS = 1e-9
_ROUNDING_EPS = 1e-6


def _check_dims(image_w: int, image_h: int):
    if image_w <= 0 or image_h <= 0:
        raise ValueError(f"image dimensions must be positive, got {image_w}x{image_h}")


class LabelFormat(ABC):
    """A label file syntax: text <-> ground-truth instances."""

    def __init__(self, class_map: Optional[Mapping[int, str]] = None):
        self.class_map = dict(class_map) if class_map is not None else None

    @abstractmethod
    def parse_line(self, tokens: List[str], line_no: int, image_w: int, image_h: int, image_id: str) -> GroundTruthInstance:
        pass

    @abstractmethod
    def format_instance(self, instance: GroundTruthInstance, image_w: int, image_h: int) -> str:
        pass

    def parse(self, text: str, image_w: int, image_h: int, image_id: str = "") -> List[GroundTruthInstance]:
        """解析标签文本为实例列表"""
        _check_dims(image_w, image_h)
        instances = []
        for line_no, line in enumerate(text.splitlines(), start=1):
            tokens = line.split()
            if not tokens:
                continue
            instances.append(self.parse_line(tokens, line_no, image_w, image_h, image_id))
        annotations_log.debug("parsed %d instances for %r", len(instances), image_id)
        return instances

    def _class_id(self, token: str, line_no: int) -> int:
        try:
            class_id = int(token)
        except ValueError:
            raise LabelParseError(line_no, token, "class id is not an integer")
        if class_id < 0 or (self.class_map is not None and class_id not in self.class_map):
            raise LabelParseError(line_no, token, "unknown class id")
        return class_id

    @staticmethod
    def _coordinate(token: str, line_no: int) -> float:
        try:
            value = float(token)
        except ValueError:
            raise LabelParseError(line_no, token, "non-numeric field")
        if not 0.0 <= value <= 1.0:
            raise LabelParseError(line_no, token, "normalized coordinate outside [0, 1]")
        return value

    @staticmethod
    def _normalize(value: float, extent: int, what: str) -> float:
        if value < -_BOUNDS_EPS or value > extent + _BOUNDS_EPS:
            raise LabelSerializationError(f"{what} {value} outside image extent {extent}")
        return min(max(value / extent, 0.0), 1.0)


class DetectionLabelFormat(LabelFormat):
    FIELD_COUNT = 5

    def parse_line(self, tokens, line_no, image_w, image_h, image_id):
        if len(tokens) != self.FIELD_COUNT:
            raise LabelParseError(line_no, " ".join(tokens),
                                  f"wrong field count: expected {self.FIELD_COUNT}, got {len(tokens)}")
        class_id = self._class_id(tokens[0], line_no)
        cx, cy, w, h = (self._coordinate(t, line_no) for t in tokens[1:])
        x0, x1, y0, y1 = cx - w / 2, cx + w / 2, cy - h / 2, cy + h / 2
        if min(x0, y0) < -_ROUNDING_EPS or max(x1, y1) > 1.0 + _ROUNDING_EPS:
            raise LabelParseError(line_no, " ".join(tokens), "box extends outside the image")
        # absorb 6-decimal rounding at the image edge
        x0, y0 = max(x0, 0.0), max(y0, 0.0)
        x1, y1 = min(x1, 1.0), min(y1, 1.0)
        box = BoundingBox(x0 * image_w, y0 * image_h, x1 * image_w, y1 * image_h)
        return GroundTruthInstance(class_id, box, image_id)

    def format_instance(self, instance, image_w, image_h):
        box = instance.box
        x0 = self._normalize(box.x_min, image_w, "x_min")
        x1 = self._normalize(box.x_max, image_w, "x_max")
        y0 = self._normalize(box.y_min, image_h, "y_min")
        y1 = self._normalize(box.y_max, image_h, "y_max")
        return (f"{instance.class_id} {(x0 + x1) / 2:.6f} {(y0 + y1) / 2:.6f} "
                f"{x1 - x0:.6f} {y1 - y0:.6f}")


class SegmentationLabelFormat(LabelFormat):

    def parse_line(self, tokens, line_no, image_w, image_h, image_id):
        class_id = self._class_id(tokens[0], line_no)
        coords = tokens[1:]
        if len(coords) % 2:
            raise LabelParseError(line_no, coords[-1], f"odd coordinate count {len(coords)}")
        if len(coords) < 6:
            raise LabelParseError(line_no, " ".join(tokens),
                                  f"polygon needs at least 3 vertices, got {len(coords) // 2}")
        values = [self._coordinate(t, line_no) for t in coords]
        vertices = tuple((values[i] * image_w, values[i + 1] * image_h) for i in range(0, len(values), 2))
        try:
            return GroundTruthInstance(class_id, PolygonMask(vertices), image_id)
        except InvalidPolygonError as e:
            raise LabelParseError(line_no, " ".join(tokens), str(e)) from e

    def format_instance(self, instance, image_w, image_h):
        mask = instance.mask if instance.mask is not None else PolygonMask.from_box(instance.box)
        parts = [str(instance.class_id)]
        for x, y in mask.vertices:
            parts.append(f"{self._normalize(x, image_w, 'x'):.6f}")
            parts.append(f"{self._normalize(y, image_h, 'y'):.6f}")
        return " ".join(parts)


def parse_detection_labels(text: str, image_w: int, image_h: int,
                           class_map: Optional[Mapping[int, str]] = TRUCK_AXLE_CLASSES,
                           image_id: str = "") -> List[GroundTruthInstance]:
    return DetectionLabelFormat(class_map).parse(text, image_w, image_h, image_id)


def parse_segmentation_labels(text: str, image_w: int, image_h: int,
                              class_map: Optional[Mapping[int, str]] = LIFTED_AXLE_CLASSES,
                              image_id: str = "") -> List[GroundTruthInstance]:
    return SegmentationLabelFormat(class_map).parse(text, image_w, image_h, image_id)


def write_labels(instances: Sequence[GroundTruthInstance], image_w: int, image_h: int) -> str:
    """
    Serialize instances with 6-decimal fixed formatting.

    Polygon instances are written in segmentation syntax, boxes in detection syntax.
    """
    _check_dims(image_w, image_h)
    detection, segmentation = DetectionLabelFormat(), SegmentationLabelFormat()
    lines = []
    for inst in instances:
        fmt = segmentation if inst.mask is not None else detection
        lines.append(fmt.format_instance(inst, image_w, image_h))
    return "".join(line + "\n" for line in lines)


LABEL_FORMATS: Dict[str, type] = {
    "detection": DetectionLabelFormat,
    "segmentation": SegmentationLabelFormat,
}
