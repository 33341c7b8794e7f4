from .base import Detector, DetectorCapabilities
from .nms import nms, nms_per_class
from .predictions import PredictionSet, PredictionsCodec, RecordedDetector, load_predictions
from .synthetic import (
    TruckSpec,
    SyntheticSceneSpec,
    SyntheticScene,
    generate_synthetic_scene,
    generate_synthetic_dataset,
    random_scene_specs,
)
from .onnx import OnnxDetector, letterbox_image, decode_output

__all__ = [
    "Detector",
    "DetectorCapabilities",
    "nms",
    "nms_per_class",
    "PredictionSet",
    "PredictionsCodec",
    "RecordedDetector",
    "load_predictions",
    "TruckSpec",
    "SyntheticSceneSpec",
    "SyntheticScene",
    "generate_synthetic_scene",
    "generate_synthetic_dataset",
    "random_scene_specs",
    "OnnxDetector",
    "letterbox_image",
    "decode_output",
]
