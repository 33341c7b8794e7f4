"""
Per-truck output records of the cascade.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..core import Detection


def _box(det: Detection) -> List[float]:
    return list(det.box.as_tuple())


@dataclass(frozen=True)
class AxleRecord:
    ordinal: int
    detection: Detection
    lifted: bool = False
    lift_conf: Optional[float] = None

    def to_dict(self) -> Dict:
        return {
            "ordinal": self.ordinal,
            "box": _box(self.detection),
            "conf": self.detection.confidence,
            "lifted": self.lifted,
            "lift_conf": self.lift_conf,
        }


@dataclass(frozen=True)
class TruckRecord:
    """One truck with its axles ordered from the steer axle.

    ``orphans`` and ``unassociated_lifted`` are the counts for the whole image.
    """
    truck: Detection
    axles: Tuple[AxleRecord, ...]
    orphans: int
    unassociated_lifted: int
    direction: str

    @property
    def axle_count(self) -> int:
        return len(self.axles)

    @property
    def lifted_ordinals(self) -> List[int]:
        return [a.ordinal for a in self.axles if a.lifted]

    def to_dict(self) -> Dict:
        return {
            "truck": {"box": _box(self.truck), "conf": self.truck.confidence},
            "axles": [a.to_dict() for a in self.axles],
            "orphans": self.orphans,
            "unassociated_lifted": self.unassociated_lifted,
            "direction": self.direction,
        }


@dataclass(frozen=True)
class CascadeResult:
    records: Tuple[TruckRecord, ...]
    orphans: Tuple[Detection, ...]
    unassociated: int
    direction: str

    def __len__(self) -> int:
        return len(self.records)

    def to_dict(self) -> Dict:
        return {
            "direction": self.direction,
            "records": [r.to_dict() for r in self.records],
            "orphans": [{"box": _box(d), "conf": d.confidence} for d in self.orphans],
            "unassociated_lifted": self.unassociated,
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=indent)
