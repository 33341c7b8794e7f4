from .instances import Detection, GroundTruthInstance, Geometry
from .classes import (
    TRUCK_AXLE_CLASSES,
    LIFTED_AXLE_CLASSES,
    CASCADE_CLASSES,
    CLASS_MAP_PRESETS,
    resolve_class_map,
    class_map_from_obj,
)

__all__ = [
    "Detection",
    "GroundTruthInstance",
    "Geometry",
    "TRUCK_AXLE_CLASSES",
    "LIFTED_AXLE_CLASSES",
    "CASCADE_CLASSES",
    "CLASS_MAP_PRESETS",
    "resolve_class_map",
    "class_map_from_obj",
]
