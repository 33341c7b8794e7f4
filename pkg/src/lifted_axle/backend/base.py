from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence

from ..core import Detection
from ..utils.exceptions import PredictionSchemaError


@dataclass(frozen=True)
class DetectorCapabilities:
    boxes: bool = True
    masks: bool = False


class Detector(ABC):
    """检测器接口：图像引用进，Detection 列表出。

    Implementations handle one request at a time unless they say otherwise.
    """

    def __init__(self, class_map: Mapping[int, str], capabilities: DetectorCapabilities = DetectorCapabilities()):
        self.class_map: Dict[int, str] = dict(class_map)
        self.capabilities = capabilities

    @property
    def name(self) -> str:
        return type(self).__name__

    @abstractmethod
    def _detect(self, image_ref: str) -> Sequence[Detection]:
        pass

    def detect(self, image_ref: str) -> List[Detection]:
        """Run the backend on ``image_ref`` and validate its response."""
        return self._validate_response(image_ref, self._detect(image_ref))

    def _validate_response(self, image_ref: str, detections: Sequence[Detection]) -> List[Detection]:
        out = []
        for i, det in enumerate(detections):
            path = f"{self.name}({image_ref!r})[{i}]"
            if det.class_id not in self.class_map:
                raise PredictionSchemaError(path, f"class {det.class_id} not in the advertised class map")
            if not 0.0 <= det.confidence <= 1.0:
                raise PredictionSchemaError(path, f"confidence {det.confidence} outside [0, 1]")
            if det.mask is not None and not self.capabilities.masks:
                raise PredictionSchemaError(path, "mask returned by a box-only detector")
            out.append(det)
        return out
