from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

import pytest

from lifted_axle.annotations import DatasetManifest, ManifestEntry, write_labels
from lifted_axle.backend import PredictionSet, PredictionsCodec
from lifted_axle.core import LIFTED_AXLE_CLASSES, TRUCK_AXLE_CLASSES, Detection, GroundTruthInstance
from lifted_axle.geometry import BoundingBox, PolygonMask


def box(x0, y0, x1, y1) -> BoundingBox:
    return BoundingBox(float(x0), float(y0), float(x1), float(y1))


def det(class_id, b, conf=0.9, image_id="", mask=None) -> Detection:
    return Detection(class_id, b if isinstance(b, BoundingBox) else box(*b), conf, image_id, mask)


def gt(class_id, b, image_id="") -> GroundTruthInstance:
    return GroundTruthInstance(class_id, b if isinstance(b, (BoundingBox, PolygonMask)) else box(*b), image_id)


@dataclass
class Fixture:
    ground_truth: Dict[str, List[GroundTruthInstance]] = field(default_factory=dict)
    predictions: Dict[str, List[Detection]] = field(default_factory=dict)
    sizes: Dict[str, Tuple[int, int]] = field(default_factory=dict)
    class_map: Dict[int, str] = field(default_factory=dict)


D1_TRUCKS, D1_TRUCKS_FOUND = 167, 164
D1_AXLES, D1_AXLES_FOUND = 623, 618
D2_LIFTED, D2_LIFTED_FOUND = 24, 22


@pytest.fixture
def dataset1() -> Fixture:
    """Truck/axle detection outcome: 164 of 167 trucks and 618 of 623 axles found, no false alarms."""
    fx = Fixture(class_map=dict(TRUCK_AXLE_CLASSES))
    axles_per_truck = [4] * 122 + [3] * 45
    assert sum(axles_per_truck) == D1_AXLES
    axle_index = 0
    for i, k in enumerate(axles_per_truck):
        image_id = f"d1_{i:03d}"
        fx.sizes[image_id] = (1000, 500)
        truck = box(100, 100, 900, 400)
        fx.ground_truth[image_id] = [gt(0, truck, image_id)]
        fx.predictions[image_id] = []
        if i < D1_TRUCKS_FOUND:
            fx.predictions[image_id].append(det(0, truck, 0.9, image_id))
        for j in range(k):
            axle = box(150 + j * 180, 330, 250 + j * 180, 390)
            fx.ground_truth[image_id].append(gt(1, axle, image_id))
            if axle_index < D1_AXLES_FOUND:
                fx.predictions[image_id].append(det(1, axle, 0.8, image_id))
            axle_index += 1
    return fx


def lifted_polygon() -> PolygonMask:
    return PolygonMask(((200, 300), (300, 300), (300, 360), (200, 360)))


@pytest.fixture
def dataset2() -> Fixture:
    """Lifted-axle segmentation outcome: 22 of 24 lifted axles found."""
    fx = Fixture(class_map=dict(LIFTED_AXLE_CLASSES))
    for i in range(D2_LIFTED):
        image_id = f"d2_{i:02d}"
        poly = lifted_polygon()
        fx.sizes[image_id] = (640, 480)
        fx.ground_truth[image_id] = [GroundTruthInstance(0, poly, image_id)]
        fx.predictions[image_id] = []
        if i < D2_LIFTED_FOUND:
            fx.predictions[image_id].append(Detection(0, poly.bounding_box(), 0.85, image_id, poly))
    return fx


def write_dataset(root: Path, fx: Fixture, kind: str = "detection", source: str = "") -> Tuple[Path, Path]:
    """Label files, manifest and predictions file for a fixture. Returns (manifest, predictions)."""
    entries = []
    for image_id in sorted(fx.ground_truth):
        w, h = fx.sizes[image_id]
        rel = f"labels/{kind}/{image_id}.txt"
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(write_labels(fx.ground_truth[image_id], w, h), encoding="utf-8")
        entries.append(ManifestEntry(image_id, w, h, rel, source=source or None))
    manifest = DatasetManifest(tuple(entries), dict(fx.class_map), explicit_class_map=True)
    manifest_path = root / "manifest.json"
    manifest_path.write_text(manifest.to_json(), encoding="utf-8")

    preds = PredictionSet()
    for image_id in sorted(fx.ground_truth):
        w, h = fx.sizes[image_id]
        preds.add_image(image_id, w, h, fx.predictions.get(image_id, []))
    preds_path = root / "predictions.json"
    preds_path.write_text(PredictionsCodec().serialize(preds), encoding="utf-8")
    return manifest_path, preds_path


@pytest.fixture
def write_fixture(tmp_path):
    def _write(fx: Fixture, kind: str = "detection", source: str = "") -> Tuple[Path, Path]:
        return write_dataset(tmp_path, fx, kind, source)
    return _write


@pytest.fixture
def scene_spec_file(tmp_path) -> Path:
    path = tmp_path / "scene.json"
    path.write_text(json.dumps({"trucks": [{"axles": 5, "lifted": [3]}], "perturbation": 0, "seed": 3}),
                    encoding="utf-8")
    return path


def random_scene(rng, n_classes=2, max_preds=6, max_gts=4):
    gts = []
    for _ in range(int(rng.integers(0, max_gts + 1))):
        x0, y0 = rng.uniform(0, 80, size=2)
        w, h = rng.uniform(5, 20, size=2)
        gts.append(GroundTruthInstance(int(rng.integers(0, n_classes)), BoundingBox(x0, y0, x0 + w, y0 + h)))
    preds = []
    for _ in range(int(rng.integers(0, max_preds + 1))):
        if gts and rng.random() < 0.7:
            g = gts[int(rng.integers(0, len(gts)))]
            d = rng.uniform(-3, 3, size=4)
            x0, x1 = sorted((g.box.x_min + d[0], g.box.x_max + d[2]))
            y0, y1 = sorted((g.box.y_min + d[1], g.box.y_max + d[3]))
            cls = g.class_id if rng.random() < 0.9 else int(rng.integers(0, n_classes))
        else:
            x0, y0 = rng.uniform(0, 80, size=2)
            x1, y1 = x0 + rng.uniform(5, 20), y0 + rng.uniform(5, 20)
            cls = int(rng.integers(0, n_classes))
        conf = float(rng.choice([0.3, 0.5, 0.7, 0.9])) if rng.random() < 0.3 else float(rng.random())
        preds.append(Detection(cls, BoundingBox(x0, y0, x1, y1), conf))
    return preds, gts
