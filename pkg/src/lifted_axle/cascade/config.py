"""
级联配置：各阶段置信度阈值、关联 IoU 下限和行驶方向。
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any, Dict, Mapping, Optional

from ..config import ConfigSection, NumberItem, Settings, SingleChoiceItem

DIRECTIONS = ("front-left", "front-right")


def _ratio(key: str, title: str, default: float) -> NumberItem:
    return NumberItem(key, title, min=0.0, max=1.0, min_inclusive=False, max_inclusive=False, default=default)


CASCADE_SETTINGS = Settings("cascade", version=1)
CASCADE_SETTINGS.add_section(
    ConfigSection("Stage thresholds")
    .add_item(_ratio("truck_conf", "Truck confidence threshold", 0.5))
    .add_item(_ratio("axle_conf", "Axle confidence threshold", 0.5))
    .add_item(_ratio("lifted_conf", "Lifted-axle confidence threshold", 0.5))
)
CASCADE_SETTINGS.add_section(
    ConfigSection("Association")
    .add_item(_ratio("association_iou", "Mask to axle IoU floor", 0.3))
    .add_item(SingleChoiceItem("direction", "Travel direction", options=list(DIRECTIONS), default="front-right"))
)


@dataclass(frozen=True)
class CascadeConfig:
    truck_conf: float = 0.5
    axle_conf: float = 0.5
    lifted_conf: float = 0.5
    association_iou: float = 0.3
    direction: str = "front-right"

    def __post_init__(self):
        CASCADE_SETTINGS.from_obj(asdict(self), base={})

    @classmethod
    def from_obj(cls, data: Mapping[str, Any], base: Optional["CascadeConfig"] = None) -> "CascadeConfig":
        values = CASCADE_SETTINGS.from_obj(dict(data), base=None if base is None else base.to_dict())
        return cls(**values)

    @classmethod
    def from_json(cls, text: str, base: Optional["CascadeConfig"] = None) -> "CascadeConfig":
        values = CASCADE_SETTINGS.from_json(text, base=None if base is None else base.to_dict())
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def flipped(self) -> "CascadeConfig":
        """Same thresholds with the opposite travel direction."""
        other = DIRECTIONS[1] if self.direction == DIRECTIONS[0] else DIRECTIONS[0]
        return CascadeConfig(self.truck_conf, self.axle_conf, self.lifted_conf, self.association_iou, other)
