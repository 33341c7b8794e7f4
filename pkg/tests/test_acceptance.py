import time

import numpy as np
import pytest

from lifted_axle.backend import generate_synthetic_dataset, random_scene_specs
from lifted_axle.cascade import CascadeConfig, run_cascade
from lifted_axle.core import LIFTED_AXLE_CLASSES, TRUCK_AXLE_CLASSES, Detection, GroundTruthInstance
from lifted_axle.geometry import BoundingBox
from lifted_axle.metrics import evaluate

# seconds; the target on a desktop machine is 5
THROUGHPUT_BUDGET = 10.0


@pytest.fixture(scope="module")
def specs_and_scenes():
    specs = random_scene_specs(60, seed=2024)
    return specs, generate_synthetic_dataset(specs)


@pytest.fixture(scope="module")
def scenes(specs_and_scenes):
    return specs_and_scenes[1]


def _all_ones(report):
    return (report.precision, report.recall, report.f1, report.map50, report.map50_95) == (1.0,) * 5


def test_synthetic_detection_closure(scenes):
    preds = [p for s in scenes for p in s.truck_axle_predictions]
    gts = [g for s in scenes for g in s.detection_gt]
    assert _all_ones(evaluate(preds, gts, TRUCK_AXLE_CLASSES).report)


def test_synthetic_segmentation_closure(scenes):
    preds = [p for s in scenes for p in s.lifted_predictions]
    gts = [g for s in scenes for g in s.segmentation_gt]
    assert gts
    report = evaluate(preds, gts, LIFTED_AXLE_CLASSES, iou_kind="mask",
                      image_sizes={s.image_id: s.size for s in scenes}).report
    assert _all_ones(report)


def test_cascade_recovers_counts_and_ordinals(specs_and_scenes):
    for spec, scene in zip(*specs_and_scenes):
        trucks = [d for d in scene.truck_axle_predictions if d.class_id == 0]
        axles = [d for d in scene.truck_axle_predictions if d.class_id == 1]
        result = run_cascade(trucks, axles, scene.lifted_predictions, CascadeConfig(direction=spec.direction))
        assert [r.axle_count for r in result.records] == scene.axle_counts
        assert [r.lifted_ordinals for r in result.records] == [list(o) for o in scene.lifted_ordinals]
        assert not result.orphans and result.unassociated == 0


@pytest.mark.perf
def test_evaluation_throughput():
    rng = np.random.default_rng(0)
    preds, gts = [], []
    for i in range(1000):
        image_id = f"perf_{i:04d}"
        xy = rng.uniform(0, 1800, size=(50, 2))
        wh = rng.uniform(10, 120, size=(50, 2))
        classes = rng.integers(0, 2, size=50)
        for (x, y), (w, h), c in zip(xy, wh, classes):
            gts.append(GroundTruthInstance(int(c), BoundingBox(x, y, x + w, y + h), image_id))
            for _ in range(2):
                d = rng.normal(0, 4, size=4)
                x0, x1 = sorted((x + d[0], x + w + d[2]))
                y0, y1 = sorted((y + d[1], y + h + d[3]))
                preds.append(Detection(int(c), BoundingBox(x0, y0, x1, y1), float(rng.random()), image_id))
    assert len(preds) == 100_000

    started = time.perf_counter()
    report = evaluate(preds, gts, TRUCK_AXLE_CLASSES).report
    elapsed = time.perf_counter() - started
    assert 0.0 < report.map50_95 <= report.map50 <= 1.0
    assert elapsed < THROUGHPUT_BUDGET
