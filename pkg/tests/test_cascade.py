import json

import pytest

from conftest import det
from lifted_axle.backend import generate_synthetic_scene, random_scene_specs
from lifted_axle.cascade import (
    CascadeConfig,
    group_axles_by_truck,
    mark_lifted_axles,
    mirror_detections,
    order_axles,
    run_cascade,
)
from lifted_axle.utils import ConfigValueError


def _truck(x0, x1, conf=0.9):
    return det(0, (x0, 100, x1, 300), conf)


def _axle(cx, conf=0.9, y1=300):
    return det(1, (cx - 10, y1 - 20, cx + 10, y1), conf)


def _lifted(cx, conf=0.9, y1=300, h=20):
    return det(2, (cx - 10, y1 - h, cx + 10, y1), conf)


def test_axles_group_by_center_containment():
    trucks = [_truck(0, 200), _truck(300, 500)]
    axles = [_axle(50), _axle(350), _axle(250), _axle(150)]
    grouping = group_axles_by_truck(trucks, axles)
    assert grouping.groups == ((axles[0], axles[3]), (axles[1],))
    assert grouping.orphans == (axles[2],)
    assert grouping.grouped_count == 3


def test_overlapping_trucks_prefer_higher_iou():
    axle = det(1, (60, 40, 90, 60))
    wide, tight = det(0, (0, 0, 100, 100)), det(0, (55, 30, 100, 70))
    grouping = group_axles_by_truck([wide, tight], [axle])
    assert grouping.groups == ((), (axle,))


def test_equal_iou_prefers_leftmost_truck():
    axle = det(1, (95, 40, 105, 60))
    left, right = det(0, (50, 0, 110, 100)), det(0, (90, 0, 150, 100))
    grouping = group_axles_by_truck([right, left], [axle])
    assert grouping.groups == ((), (axle,))


def test_no_trucks_makes_every_axle_an_orphan():
    axles = [_axle(50), _axle(100)]
    assert group_axles_by_truck([], axles).orphans == tuple(axles)


def test_order_axles_by_direction():
    group = [_axle(50), _axle(150), _axle(100)]
    right = order_axles(group, "front-right")
    assert [(o.ordinal, o.detection.box.center[0]) for o in right] == [(1, 150), (2, 100), (3, 50)]
    left = order_axles(group, "front-left")
    assert [o.detection.box.center[0] for o in left] == [50, 100, 150]
    with pytest.raises(ValueError):
        order_axles(group, "north")


def test_highest_iou_mask_wins_the_axle():
    axle = det(1, (0, 0, 10, 10))
    m08, m06 = det(2, (0, 0, 10, 8), 0.5), det(2, (0, 0, 10, 6), 0.99)
    assignment = mark_lifted_axles([axle], [m06, m08])
    assert assignment.masks == (m08,)
    assert assignment.unassociated == 1
    assert assignment.lifted == [True]


def test_equal_iou_masks_prefer_confidence():
    axle = det(1, (0, 0, 10, 10))
    low, high = det(2, (0, 0, 10, 10), 0.6), det(2, (0, 0, 10, 10), 0.8)
    assert mark_lifted_axles([axle], [low, high]).masks == (high,)


def test_masks_below_floor_are_unassociated():
    axle = det(1, (0, 0, 10, 10))
    assignment = mark_lifted_axles([axle], [det(2, (0, 0, 10, 2))], floor=0.3)
    assert assignment.masks == (None,)
    assert assignment.unassociated == 1
    assert mark_lifted_axles([], [det(2, (0, 0, 1, 1))]).unassociated == 1


def test_run_cascade_end_to_end():
    trucks = [_truck(0, 400)]
    axles = [_axle(50), _axle(150), _axle(250), _axle(350)]
    lifted = [_lifted(150, y1=296)]
    result = run_cascade(trucks, axles, lifted)
    (record,) = result.records
    assert record.axle_count == 4
    assert record.lifted_ordinals == [3]
    assert record.orphans == 0 and record.unassociated_lifted == 0
    assert result.to_dict()["records"][0]["axles"][2]["lifted"] is True


def test_truck_below_threshold_orphans_its_axles():
    trucks = [_truck(0, 400, conf=0.53)]
    axles = [_axle(50), _axle(150)]
    result = run_cascade(trucks, axles, [_lifted(50)], CascadeConfig(truck_conf=0.6))
    assert len(result) == 0
    assert result.orphans == tuple(axles)
    assert result.unassociated == 1


def test_low_confidence_stages_are_filtered():
    result = run_cascade([_truck(0, 400)], [_axle(50), _axle(150, conf=0.2)], [_lifted(50, conf=0.4)])
    (record,) = result.records
    assert record.axle_count == 1
    assert record.lifted_ordinals == []


def test_axle_conservation_and_idempotence():
    for spec in random_scene_specs(30, seed=9, perturbation=1.5):
        scene = generate_synthetic_scene(spec)
        trucks = [d for d in scene.truck_axle_predictions if d.class_id == 0]
        axles = [d for d in scene.truck_axle_predictions if d.class_id == 1]
        config = CascadeConfig(direction=spec.direction)
        result = run_cascade(trucks, axles, scene.lifted_predictions, config)
        assert sum(r.axle_count for r in result.records) + len(result.orphans) == len(axles)
        assert run_cascade(trucks, axles, scene.lifted_predictions, config) == result


def test_mirror_symmetry():
    for spec in random_scene_specs(100, seed=21, perturbation=2.0):
        scene = generate_synthetic_scene(spec)
        trucks = [d for d in scene.truck_axle_predictions if d.class_id == 0]
        axles = [d for d in scene.truck_axle_predictions if d.class_id == 1]
        config = CascadeConfig(direction=spec.direction)
        base = run_cascade(trucks, axles, scene.lifted_predictions, config)
        mirrored = run_cascade(mirror_detections(trucks, scene.width), mirror_detections(axles, scene.width),
                               mirror_detections(scene.lifted_predictions, scene.width), config.flipped())
        assert [r.axle_count for r in mirrored.records] == [r.axle_count for r in base.records]
        assert [r.lifted_ordinals for r in mirrored.records] == [r.lifted_ordinals for r in base.records]
        assert [r.lifted_ordinals for r in base.records] == [list(o) for o in scene.lifted_ordinals]


def test_config_validation():
    with pytest.raises(ConfigValueError) as err:
        CascadeConfig(truck_conf=1.5)
    assert err.value.key == "truck_conf"
    with pytest.raises(ConfigValueError) as err:
        CascadeConfig.from_obj({"direction": "north"})
    assert "front-left" in str(err.value) and "front-right" in str(err.value)
    with pytest.raises(ConfigValueError):
        CascadeConfig(association_iou=0.0)


def test_config_from_json_with_base():
    base = CascadeConfig(direction="front-left")
    cfg = CascadeConfig.from_json(json.dumps({"axle_conf": 0.7}), base=base)
    assert cfg.axle_conf == 0.7 and cfg.direction == "front-left"
    assert cfg.flipped().direction == "front-right"
    assert CascadeConfig.from_obj({}) == CascadeConfig()
