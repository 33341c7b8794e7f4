from typing import Dict

from ..utils.exceptions import ConfigValueError

TRUCK_AXLE_CLASSES: Dict[int, str] = {0: "truck", 1: "axle"}
LIFTED_AXLE_CLASSES: Dict[int, str] = {0: "lifted_axle"}
CASCADE_CLASSES: Dict[int, str] = {0: "truck", 1: "axle", 2: "lifted_axle"}

CLASS_MAP_PRESETS: Dict[str, Dict[int, str]] = {
    "truck-axle": TRUCK_AXLE_CLASSES,
    "lifted-axle": LIFTED_AXLE_CLASSES,
    "cascade": CASCADE_CLASSES,
}


def resolve_class_map(name: str) -> Dict[int, str]:
    if name not in CLASS_MAP_PRESETS:
        raise ConfigValueError("classes", f"{name!r} is not one of {', '.join(CLASS_MAP_PRESETS)}")
    return dict(CLASS_MAP_PRESETS[name])


def class_map_from_obj(data: Dict) -> Dict[int, str]:
    """Accept ``{"0": "truck", ...}`` as found in JSON and return int keys."""
    if not isinstance(data, dict) or not data:
        raise ConfigValueError("class_map", "expected a non-empty object")
    out = {}
    for key, name in data.items():
        try:
            class_id = int(key)
        except (TypeError, ValueError):
            raise ConfigValueError("class_map", f"class id {key!r} is not an integer")
        if class_id < 0 or not isinstance(name, str):
            raise ConfigValueError("class_map", f"bad entry {key!r}: {name!r}")
        out[class_id] = name
    return dict(sorted(out.items()))
