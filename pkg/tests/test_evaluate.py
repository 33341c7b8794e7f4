import json

import numpy as np
import pytest

from conftest import D1_AXLES, D1_AXLES_FOUND, D1_TRUCKS, D1_TRUCKS_FOUND, det, gt, random_scene
from lifted_axle.core import TRUCK_AXLE_CLASSES
from lifted_axle.metrics import (
    THRESHOLDS_50_95,
    confusion_matrix,
    envelope_csv,
    evaluate,
    format_confusion,
    format_report,
    map_over_thresholds,
)
from lifted_axle.utils import MatchingError


def test_thresholds_50_95():
    assert len(THRESHOLDS_50_95) == 10
    assert THRESHOLDS_50_95[0] == 0.5 and THRESHOLDS_50_95[-1] == 0.95


def test_dataset1_confusion_and_recall(dataset1):
    ev = evaluate(dataset1.predictions, dataset1.ground_truth, dataset1.class_map)
    cm = ev.confusion
    assert cm.labels() == ["truck", "axle", "background"]
    assert cm.row(0) == (D1_TRUCKS_FOUND, 0, D1_TRUCKS - D1_TRUCKS_FOUND)
    assert cm.row(1) == (0, D1_AXLES_FOUND, D1_AXLES - D1_AXLES_FOUND)
    assert cm.counts[cm.background].sum() == 0
    assert cm.recall(0) == pytest.approx(0.9820, abs=1e-4)
    assert cm.recall(1) == pytest.approx(0.9920, abs=1e-4)

    truck, axle = ev.report.for_class(0), ev.report.for_class(1)
    assert (truck.tp, truck.fp, truck.fn) == (164, 0, 3)
    assert axle.precision == 1.0
    assert truck.ap50 == pytest.approx(99 / 101)
    assert axle.ap50 == pytest.approx(100 / 101)
    assert ev.report.map50_95 == pytest.approx(ev.report.map50)


def test_dataset2_mask_mode(dataset2):
    ev = evaluate(dataset2.predictions, dataset2.ground_truth, dataset2.class_map,
                  iou_kind="mask", image_sizes=dataset2.sizes)
    assert ev.confusion.row(0) == (22, 2)
    assert ev.confusion.recall(0) == pytest.approx(0.9167, abs=1e-4)
    assert ev.report.precision == 1.0


def test_mask_mode_without_sizes_fails(dataset2):
    with pytest.raises(MatchingError):
        evaluate(dataset2.predictions, dataset2.ground_truth, dataset2.class_map, iou_kind="mask")


def test_iou_exactly_on_threshold_counts():
    preds = [det(0, (0, 0, 10, 7), 0.9, image_id="a")]
    gts = [gt(0, (0, 0, 10, 10), image_id="a")]
    sweep = map_over_thresholds(preds, gts)
    assert sweep.per_class_ap[0] == (1.0,) * 5 + (0.0,) * 5
    assert sweep.mean == 0.5


def test_perfect_predictions_score_one():
    gts = [gt(c, (10 * i, 0, 10 * i + 8, 8), image_id=f"img{i % 3}") for i, c in enumerate([0, 1, 1, 0, 1])]
    preds = [det(g.class_id, g.box, 0.9, image_id=g.image_id) for g in gts]
    report = evaluate(preds, gts, TRUCK_AXLE_CLASSES).report
    assert (report.precision, report.recall, report.f1) == (1.0, 1.0, 1.0)
    assert report.map50 == 1.0 and report.map50_95 == 1.0


def test_no_predictions_score_zero():
    gts = [gt(0, (0, 0, 10, 10), image_id="a"), gt(1, (20, 20, 30, 30), image_id="a")]
    ev = evaluate([], gts, TRUCK_AXLE_CLASSES)
    assert (ev.report.precision, ev.report.recall, ev.report.f1) == (0.0, 0.0, 0.0)
    assert ev.report.map50 == 0.0
    assert ev.confusion.row(0) == (0, 0, 1)


def test_empty_inputs_give_zero_matrix_and_undefined_map():
    ev = evaluate([], [], TRUCK_AXLE_CLASSES)
    assert not ev.confusion.counts.any()
    assert ev.confusion.counts.shape == (3, 3)
    assert ev.report.map50 is None and ev.report.map50_95 is None


def test_wrong_class_lands_off_diagonal():
    cm = confusion_matrix([det(1, (0, 0, 10, 10), 0.9, image_id="a")], [gt(0, (0, 0, 10, 10), image_id="a")],
                          TRUCK_AXLE_CLASSES)
    assert cm.row(0) == (0, 1, 0)
    assert cm.counts.sum() == 1


def test_confusion_threshold_drops_low_confidence():
    preds = [det(0, (0, 0, 10, 10), 0.1, image_id="a")]
    gts = [gt(0, (0, 0, 10, 10), image_id="a")]
    assert confusion_matrix(preds, gts, TRUCK_AXLE_CLASSES).row(0) == (0, 0, 1)
    assert confusion_matrix(preds, gts, TRUCK_AXLE_CLASSES, confidence_threshold=0.05).row(0) == (1, 0, 0)


def test_markdown_report(dataset1):
    report = evaluate(dataset1.predictions, dataset1.ground_truth, dataset1.class_map).report
    lines = format_report(report, "markdown").splitlines()
    assert lines[0] == "| Class | Precision | Recall | F1-score | mAP50 | mAP50-95 |"
    assert lines[2].startswith("| all | 1.0000 | 0.9870 | 0.9935 |")
    assert lines[3].startswith("| truck | 1.0000 | 0.9820 |")


def test_report_formats_embed_run():
    report = evaluate([], [], TRUCK_AXLE_CLASSES).report
    run = {"command": "evaluate"}
    body = json.loads(format_report(report, "json", run))
    assert body["run"] == run and body["report"]["all"]["map50"] is None
    assert format_report(report, "markdown").count("| - |") >= 1
    assert format_report(report, "csv", run).startswith('# run: {"command": "evaluate"}\n')
    with pytest.raises(ValueError):
        format_report(report, "yaml")


def test_confusion_formats(dataset1):
    cm = evaluate(dataset1.predictions, dataset1.ground_truth, dataset1.class_map).confusion
    assert json.loads(format_confusion(cm))["confusion_matrix"]["counts"][0] == [164, 0, 3]
    assert format_confusion(cm, "csv").splitlines()[1] == "truck,164,0,3"


def test_envelope_csv(dataset1):
    sweep = evaluate(dataset1.predictions, dataset1.ground_truth, dataset1.class_map).sweep
    lines = envelope_csv(sweep, dataset1.class_map).splitlines()
    assert lines[0] == "class,recall,precision"
    assert len(lines) == 1 + 2 * 101
    assert lines[1] == "truck,0.00,1.0000"
    assert np.all([float(line.split(",")[2]) <= 1.0 for line in lines[1:]])


def test_scores_ignore_confidence_scale():
    rng = np.random.default_rng(41)
    for _ in range(300):
        preds, gts = random_scene(rng)
        halved = [p.with_confidence(p.confidence / 2) for p in preds]
        assert map_over_thresholds(preds, gts).per_class_ap == map_over_thresholds(halved, gts).per_class_ap
        full = confusion_matrix(preds, gts, TRUCK_AXLE_CLASSES, confidence_threshold=0.0)
        scaled = confusion_matrix(halved, gts, TRUCK_AXLE_CLASSES, confidence_threshold=0.0)
        assert (full.counts == scaled.counts).all()
