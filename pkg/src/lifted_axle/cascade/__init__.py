from .config import CASCADE_SETTINGS, DIRECTIONS, CascadeConfig
from .records import AxleRecord, TruckRecord, CascadeResult
from .pipeline import (
    AxleGrouping,
    OrderedAxle,
    LiftAssignment,
    group_axles_by_truck,
    order_axles,
    mark_lifted_axles,
    run_cascade,
    mirror_detections,
)

__all__ = [
    "CASCADE_SETTINGS",
    "DIRECTIONS",
    "CascadeConfig",
    "AxleRecord",
    "TruckRecord",
    "CascadeResult",
    "AxleGrouping",
    "OrderedAxle",
    "LiftAssignment",
    "group_axles_by_truck",
    "order_axles",
    "mark_lifted_axles",
    "run_cascade",
    "mirror_detections",
]
