"""
Deterministic synthetic truck scenes with known ground truth.

Trucks occupy equal horizontal slots in the middle half of the image. Axles
are evenly spaced along each truck's lower edge; lifted axles sit raised
above the axle line and carry a rectangular mask. Predictions are the ground
truth perturbed by at most ``perturbation`` pixels per coordinate.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..annotations.dataset import AXLE_COUNT_RANGE
from ..cascade import DIRECTIONS
from ..core import Detection, GroundTruthInstance
from ..geometry import BoundingBox, PolygonMask
from ..utils.exceptions import ConfigValueError, LayoutError

backend_log = logging.getLogger('backend')

TRUCK_CLASS = 0
AXLE_CLASS = 1
LIFTED_CLASS = 0

MIN_AXLE_PX = 8.0
SLOT_MARGIN = 0.05
AXLE_WIDTH_SHARE = 0.6
LIFT_SHARE = 0.2

ConfRange = Tuple[float, float]


def _conf_range(value: Any, key: str) -> ConfRange:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigValueError(key, f"expected [low, high], got {value!r}")
    lo, hi = (float(v) for v in value)
    if not 0.0 <= lo <= hi <= 1.0:
        raise ConfigValueError(key, f"range [{lo}, {hi}] must satisfy 0 <= low <= high <= 1")
    return lo, hi


@dataclass(frozen=True)
class TruckSpec:
    axle_count: int
    lifted: Tuple[int, ...] = ()

    def __post_init__(self):
        if isinstance(self.axle_count, bool) or not isinstance(self.axle_count, int) \
                or self.axle_count not in AXLE_COUNT_RANGE:
            raise ConfigValueError("axles", f"axle count {self.axle_count!r} outside "
                                            f"{AXLE_COUNT_RANGE[0]}..{AXLE_COUNT_RANGE[-1]}")
        lifted = tuple(sorted(set(int(o) for o in self.lifted)))
        for o in lifted:
            if not 1 <= o <= self.axle_count:
                raise ConfigValueError("lifted", f"ordinal {o} outside 1..{self.axle_count}")
        object.__setattr__(self, "lifted", lifted)


@dataclass(frozen=True)
class SyntheticSceneSpec:
    trucks: Tuple[TruckSpec, ...]
    image_w: int = 1280
    image_h: int = 720
    perturbation: float = 0.0
    truck_conf: ConfRange = (0.9, 1.0)
    axle_conf: ConfRange = (0.9, 1.0)
    lifted_conf: ConfRange = (0.9, 1.0)
    seed: int = 0
    direction: str = "front-right"
    image_id: str = "synth"

    def __post_init__(self):
        object.__setattr__(self, "trucks", tuple(self.trucks))
        if self.image_w <= 0 or self.image_h <= 0:
            raise ConfigValueError("size", f"image size must be positive, got {self.image_w}x{self.image_h}")
        if self.perturbation < 0:
            raise ConfigValueError("perturbation", f"must be >= 0, got {self.perturbation}")
        if self.direction not in DIRECTIONS:
            raise ConfigValueError("direction", f"{self.direction!r} is not one of {', '.join(DIRECTIONS)}")
        for key in ("truck_conf", "axle_conf", "lifted_conf"):
            object.__setattr__(self, key, _conf_range(getattr(self, key), key))

    @classmethod
    def from_obj(cls, data: Mapping[str, Any]) -> "SyntheticSceneSpec":
        if not isinstance(data, Mapping):
            raise ConfigValueError("<root>", f"expected an object, got {type(data).__name__}")
        raw_trucks = data.get("trucks")
        if not isinstance(raw_trucks, list):
            raise ConfigValueError("trucks", "expected an array of {axles, lifted} objects")
        trucks = []
        for t in raw_trucks:
            if not isinstance(t, Mapping) or "axles" not in t:
                raise ConfigValueError("trucks", f"entry {t!r} has no 'axles'")
            trucks.append(TruckSpec(t["axles"], tuple(t.get("lifted", ()))))
        known = {"trucks", "width", "height", "perturbation", "truck_conf", "axle_conf",
                 "lifted_conf", "seed", "direction", "image_id"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigValueError(unknown[0], "unknown key")
        kwargs = {
            "image_w": data.get("width", 1280),
            "image_h": data.get("height", 720),
            "perturbation": float(data.get("perturbation", 0.0)),
            "seed": int(data.get("seed", 0)),
            "direction": data.get("direction", "front-right"),
            "image_id": data.get("image_id", "synth"),
        }
        for key in ("truck_conf", "axle_conf", "lifted_conf"):
            if key in data:
                kwargs[key] = data[key]
        return cls(tuple(trucks), **kwargs)


@dataclass
class SyntheticScene:
    image_id: str
    width: int
    height: int
    detection_gt: List[GroundTruthInstance] = field(default_factory=list)
    segmentation_gt: List[GroundTruthInstance] = field(default_factory=list)
    truck_axle_predictions: List[Detection] = field(default_factory=list)
    lifted_predictions: List[Detection] = field(default_factory=list)
    axle_counts: List[int] = field(default_factory=list)
    lifted_ordinals: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def size(self) -> Tuple[int, int]:
        return (self.width, self.height)


def _truck_boxes(spec: SyntheticSceneSpec) -> List[BoundingBox]:
    n = len(spec.trucks)
    if n == 0:
        return []
    slot = spec.image_w / n
    margin = SLOT_MARGIN * slot
    y0, y1 = 0.25 * spec.image_h, 0.75 * spec.image_h
    return [BoundingBox(i * slot + margin, y0, (i + 1) * slot - margin, y1) for i in range(n)]


def _axle_boxes(truck: BoundingBox, t: TruckSpec, direction: str) -> List[Tuple[int, BoundingBox]]:
    """(ordinal, box) pairs, left to right."""
    k = t.axle_count
    pitch = truck.width / k
    axle_w = AXLE_WIDTH_SHARE * pitch
    axle_h = min(axle_w, 0.2 * truck.height)
    if axle_w < MIN_AXLE_PX or axle_h < MIN_AXLE_PX:
        raise LayoutError(f"{k} axles leave {axle_w:.1f}x{axle_h:.1f} px per axle, below {MIN_AXLE_PX:.0f} px")
    lift = LIFT_SHARE * axle_h
    out = []
    for i in range(k):
        ordinal = k - i if direction == "front-right" else i + 1
        cx = truck.x_min + (i + 0.5) * pitch
        y_max = truck.y_max - (lift if ordinal in t.lifted else 0.0)
        out.append((ordinal, BoundingBox(cx - axle_w / 2, y_max - axle_h, cx + axle_w / 2, y_max)))
    return out


class _Perturber:
    def __init__(self, spec: SyntheticSceneSpec):
        self.rng = np.random.default_rng(spec.seed)
        self.p = spec.perturbation
        self.w = spec.image_w
        self.h = spec.image_h

    def box(self, box: BoundingBox) -> BoundingBox:
        if self.p == 0:
            return box
        d = self.rng.uniform(-self.p, self.p, size=4)
        xs = np.clip([box.x_min + d[0], box.x_max + d[2]], 0.0, self.w)
        ys = np.clip([box.y_min + d[1], box.y_max + d[3]], 0.0, self.h)
        return BoundingBox(float(xs.min()), float(ys.min()), float(xs.max()), float(ys.max()))

    def conf(self, bounds: ConfRange) -> float:
        return float(self.rng.uniform(bounds[0], bounds[1])) if bounds[0] < bounds[1] else bounds[0]


def generate_synthetic_scene(spec: SyntheticSceneSpec) -> SyntheticScene:
    """Ground truth and predictions for one scene; identical output for identical specs."""
    scene = SyntheticScene(spec.image_id, spec.image_w, spec.image_h)
    noise = _Perturber(spec)
    for truck_box, t in zip(_truck_boxes(spec), spec.trucks):
        axles = _axle_boxes(truck_box, t, spec.direction)
        scene.detection_gt.append(GroundTruthInstance(TRUCK_CLASS, truck_box, spec.image_id))
        scene.truck_axle_predictions.append(
            Detection(TRUCK_CLASS, noise.box(truck_box), noise.conf(spec.truck_conf), spec.image_id))
        for ordinal, axle_box in axles:
            scene.detection_gt.append(GroundTruthInstance(AXLE_CLASS, axle_box, spec.image_id))
            scene.truck_axle_predictions.append(
                Detection(AXLE_CLASS, noise.box(axle_box), noise.conf(spec.axle_conf), spec.image_id))
            if ordinal in t.lifted:
                scene.segmentation_gt.append(
                    GroundTruthInstance(LIFTED_CLASS, PolygonMask.from_box(axle_box), spec.image_id))
                pred_box = noise.box(axle_box)
                scene.lifted_predictions.append(
                    Detection(LIFTED_CLASS, pred_box, noise.conf(spec.lifted_conf), spec.image_id,
                              PolygonMask.from_box(pred_box)))
        scene.axle_counts.append(t.axle_count)
        scene.lifted_ordinals.append(t.lifted)
    backend_log.debug("synthetic scene %s: %d trucks, %d lifted", spec.image_id, len(spec.trucks),
                      len(scene.segmentation_gt))
    return scene


def generate_synthetic_dataset(specs: Sequence[SyntheticSceneSpec], prefix: str = "synth") -> List[SyntheticScene]:
    """One scene per spec, ids ``synth_0000``, ``synth_0001``..."""
    scenes = []
    for i, spec in enumerate(specs):
        named = SyntheticSceneSpec(spec.trucks, spec.image_w, spec.image_h, spec.perturbation,
                                   spec.truck_conf, spec.axle_conf, spec.lifted_conf, spec.seed,
                                   spec.direction, f"{prefix}_{i:04d}")
        scenes.append(generate_synthetic_scene(named))
    return scenes


def random_scene_specs(count: int, seed: int = 0, max_trucks: int = 5, perturbation: float = 0.0,
                       image_w: int = 1920, image_h: int = 720,
                       direction: Optional[str] = None) -> List[SyntheticSceneSpec]:
    """Random valid specs: 1..max_trucks trucks, 2..9 axles, arbitrary lifted sets."""
    rng = np.random.default_rng(seed)
    specs = []
    for i in range(count):
        trucks = []
        for _ in range(int(rng.integers(1, max_trucks + 1))):
            k = int(rng.integers(AXLE_COUNT_RANGE[0], AXLE_COUNT_RANGE[-1] + 1))
            lifted = tuple(int(o) for o in np.nonzero(rng.random(k) < 0.25)[0] + 1)
            trucks.append(TruckSpec(k, lifted))
        specs.append(SyntheticSceneSpec(tuple(trucks), image_w, image_h, perturbation,
                                        seed=seed * 100003 + i,
                                        direction=direction or DIRECTIONS[int(rng.integers(0, 2))]))
    return specs
