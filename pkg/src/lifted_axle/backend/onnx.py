"""
Optional ONNX detector (extra ``onnx``). Box output only.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Mapping, Sequence

import numpy as np
from PIL import Image

from ..core import Detection
from ..geometry import BoundingBox, LetterboxTransform, letterbox
from ..utils.exceptions import BackendUnavailableError, InputNotFoundError, PredictionSchemaError
from .base import Detector, DetectorCapabilities
from .nms import nms_per_class

backend_log = logging.getLogger('backend')

PAD_VALUE = 114


def letterbox_image(image: Image.Image, target: int = 640) -> tuple[np.ndarray, LetterboxTransform]:
    """RGB image -> ``(1, 3, target, target)`` float32 tensor in [0, 1] plus its mapping."""
    transform = letterbox(image.width, image.height, target)
    resized = image.convert("RGB").resize((transform.content_w, transform.content_h), Image.BILINEAR)
    canvas = Image.new("RGB", (target, target), (PAD_VALUE,) * 3)
    canvas.paste(resized, (transform.pad_left, transform.pad_top))
    tensor = np.asarray(canvas, dtype=np.float32).transpose(2, 0, 1)[None] / 255.0
    return tensor, transform


def decode_output(output: np.ndarray, transform: LetterboxTransform, class_ids: Sequence[int],
                  conf_threshold: float, image_id: str = "") -> List[Detection]:
    """Decode a ``(1, 4 + nc, N)`` head output into source-frame detections."""
    if output.ndim != 3 or output.shape[0] != 1 or output.shape[1] != 4 + len(class_ids):
        raise PredictionSchemaError("onnx output", f"expected shape (1, {4 + len(class_ids)}, N), got {output.shape}")
    rows = output[0].T
    scores = rows[:, 4:]
    best = scores.argmax(axis=1)
    conf = scores[np.arange(rows.shape[0]), best]
    keep = np.nonzero(conf >= conf_threshold)[0]

    dets = []
    for i in keep:
        cx, cy, w, h = (float(v) for v in rows[i, :4])
        box = transform.clip_to_source(transform.box_to_source(BoundingBox.from_xywh(cx, cy, w, h)))
        dets.append(Detection(class_ids[int(best[i])], box, float(np.clip(conf[i], 0.0, 1.0)), image_id))
    return dets


class OnnxDetector(Detector):
    """Runs an exported YOLO-style detection model; one request at a time per instance."""

    def __init__(self, model_path: str, class_map: Mapping[int, str], input_size: int = 640,
                 conf_threshold: float = 0.25, iou_threshold: float = 0.7):
        super().__init__(class_map, DetectorCapabilities(boxes=True, masks=False))
        try:
            import onnxruntime as ort
        except ImportError as e:
            raise BackendUnavailableError("onnx", "install the 'onnx' extra (onnxruntime)") from e
        if not Path(model_path).is_file():
            raise InputNotFoundError(model_path)
        sess_options = ort.SessionOptions()
        sess_options.graph_optimization_level = ort.GraphOptimizationLevel.ORT_ENABLE_ALL
        self.session = ort.InferenceSession(model_path, sess_options)
        self.input_name = self.session.get_inputs()[0].name
        self.output_name = self.session.get_outputs()[0].name
        self.input_size = input_size
        self.conf_threshold = conf_threshold
        self.iou_threshold = iou_threshold
        backend_log.info("ONNX model loaded: %s", model_path)

    def _detect(self, image_ref: str) -> Sequence[Detection]:
        path = Path(image_ref)
        if not path.is_file():
            raise InputNotFoundError(image_ref)
        with Image.open(path) as image:
            tensor, transform = letterbox_image(image, self.input_size)
        output = self.session.run([self.output_name], {self.input_name: tensor})[0]
        dets = decode_output(np.asarray(output), transform, sorted(self.class_map), self.conf_threshold, path.stem)
        return nms_per_class(dets, self.iou_threshold)
