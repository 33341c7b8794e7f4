"""
Recorded predictions files.

    {"images": [{"id": str, "width": int, "height": int,
                 "detections": [{"class": int, "conf": float,
                                 "box": [x_min, y_min, x_max, y_max],
                                 "mask": [[x, y], ...]}]}]}

``mask`` is optional. A bare top-level array is read as the ``images`` list.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from ..core import Detection
from ..geometry import BoundingBox, PolygonMask
from ..utils.exceptions import InvalidBoxError, InvalidPolygonError, PredictionSchemaError
from .base import Detector, DetectorCapabilities

backend_log = logging.getLogger('backend')


@dataclass
class PredictionSet:
    detections: Dict[str, List[Detection]] = field(default_factory=dict)
    sizes: Dict[str, Tuple[int, int]] = field(default_factory=dict)

    def image_ids(self) -> List[str]:
        return sorted(set(self.detections) | set(self.sizes))

    def add_image(self, image_id: str, width: int, height: int, detections: Sequence[Detection] = ()):
        self.sizes[image_id] = (width, height)
        self.detections.setdefault(image_id, []).extend(detections)

    def flat(self) -> List[Detection]:
        return [d for image_id in self.image_ids() for d in self.detections.get(image_id, ())]


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise PredictionSchemaError(path, f"expected a finite number, got {value!r}")
    return float(value)


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise PredictionSchemaError(path, f"expected an integer, got {value!r}")
    return value


def _expect(value: Any, kind: type, path: str):
    if not isinstance(value, kind):
        raise PredictionSchemaError(path, f"expected {'an object' if kind is dict else 'an array'}, "
                                          f"got {type(value).__name__}")
    return value


def _required(obj: Mapping, key: str, path: str) -> Any:
    if key not in obj:
        raise PredictionSchemaError(path, f"missing key {key!r}")
    return obj[key]


class PredictionsCodec:
    """预测文件编解码"""

    def __init__(self, class_map: Optional[Mapping[int, str]] = None):
        self.class_map = dict(class_map) if class_map is not None else None

    def parse(self, text: str) -> PredictionSet:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise PredictionSchemaError("$", f"invalid JSON: {e.msg} at line {e.lineno}") from e
        if isinstance(data, dict):
            images = _expect(_required(data, "images", "$"), list, "$.images")
            base = "$.images"
        else:
            images = _expect(data, list, "$")
            base = "$"

        out = PredictionSet()
        for i, image in enumerate(images):
            path = f"{base}[{i}]"
            _expect(image, dict, path)
            image_id = _required(image, "id", path)
            if not isinstance(image_id, str):
                raise PredictionSchemaError(f"{path}.id", f"expected a string, got {image_id!r}")
            if image_id in out.sizes:
                raise PredictionSchemaError(f"{path}.id", f"duplicate image id {image_id!r}")
            width = _integer(_required(image, "width", path), f"{path}.width")
            height = _integer(_required(image, "height", path), f"{path}.height")
            if width <= 0 or height <= 0:
                raise PredictionSchemaError(path, f"image size must be positive, got {width}x{height}")
            dets = _expect(image.get("detections", []), list, f"{path}.detections")
            out.add_image(image_id, width, height,
                          [self._detection(d, f"{path}.detections[{j}]", image_id) for j, d in enumerate(dets)])
        backend_log.debug("loaded predictions for %d images", len(out.sizes))
        return out

    def _detection(self, obj: Any, path: str, image_id: str) -> Detection:
        _expect(obj, dict, path)
        class_id = _integer(_required(obj, "class", path), f"{path}.class")
        if class_id < 0 or (self.class_map is not None and class_id not in self.class_map):
            raise PredictionSchemaError(f"{path}.class", f"unknown class id {class_id}")
        conf = _number(_required(obj, "conf", path), f"{path}.conf")
        if not 0.0 <= conf <= 1.0:
            raise PredictionSchemaError(f"{path}.conf", f"confidence {conf} outside [0, 1]")

        raw_box = _expect(_required(obj, "box", path), list, f"{path}.box")
        if len(raw_box) != 4:
            raise PredictionSchemaError(f"{path}.box", f"expected 4 numbers, got {len(raw_box)}")
        coords = [_number(v, f"{path}.box[{k}]") for k, v in enumerate(raw_box)]
        try:
            box = BoundingBox(*coords)
        except InvalidBoxError as e:
            raise PredictionSchemaError(f"{path}.box", e.message) from e

        mask = None
        if obj.get("mask") is not None:
            raw_mask = _expect(obj["mask"], list, f"{path}.mask")
            points = []
            for k, point in enumerate(raw_mask):
                _expect(point, list, f"{path}.mask[{k}]")
                if len(point) != 2:
                    raise PredictionSchemaError(f"{path}.mask[{k}]", "expected an [x, y] pair")
                points.append((_number(point[0], f"{path}.mask[{k}][0]"), _number(point[1], f"{path}.mask[{k}][1]")))
            try:
                mask = PolygonMask(tuple(points))
            except InvalidPolygonError as e:
                raise PredictionSchemaError(f"{path}.mask", e.message) from e
        return Detection(class_id, box, conf, image_id, mask)

    def serialize(self, predictions: PredictionSet) -> str:
        """序列化为 JSON，图像按 id 排序"""
        images = []
        for image_id in predictions.image_ids():
            if image_id not in predictions.sizes:
                raise PredictionSchemaError(f"image {image_id!r}", "image size unknown")
            width, height = predictions.sizes[image_id]
            dets = []
            for d in predictions.detections.get(image_id, ()):
                obj = {"class": d.class_id, "conf": d.confidence, "box": list(d.box.as_tuple())}
                if d.mask is not None:
                    obj["mask"] = [list(v) for v in d.mask.vertices]
                dets.append(obj)
            images.append({"id": image_id, "width": width, "height": height, "detections": dets})
        return json.dumps({"images": images}, ensure_ascii=False, indent=2) + "\n"


def load_predictions(text: str, class_map: Optional[Mapping[int, str]] = None) -> Dict[str, List[Detection]]:
    """Per-image detections, iterated in image id order."""
    parsed = PredictionsCodec(class_map).parse(text)
    return {image_id: list(parsed.detections.get(image_id, ())) for image_id in parsed.image_ids()}


class RecordedDetector(Detector):
    """Serves detections from a predictions file; the image reference is the image id."""

    def __init__(self, predictions: PredictionSet, class_map: Mapping[int, str]):
        has_masks = any(d.mask is not None for d in predictions.flat())
        super().__init__(class_map, DetectorCapabilities(boxes=True, masks=has_masks))
        self.predictions = predictions

    @classmethod
    def from_text(cls, text: str, class_map: Mapping[int, str]) -> "RecordedDetector":
        return cls(PredictionsCodec(class_map).parse(text), class_map)

    def _detect(self, image_ref: str) -> Sequence[Detection]:
        return self.predictions.detections.get(image_ref, [])
