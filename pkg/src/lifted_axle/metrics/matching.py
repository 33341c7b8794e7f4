"""
Greedy confidence-ordered matching of predictions to ground truth.

Predictions are visited by descending confidence (stable, so equal
confidences keep input order). Each one claims the still-unmatched ground
truth of highest IoU at or above the threshold; equal IoUs go to the lower
ground-truth index. The engine evaluates a whole vector of thresholds in one
pass so a mAP50-95 sweep costs a single loop over predictions.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core import Detection, GroundTruthInstance
from ..geometry import PolygonMask, box_iou_matrix, boxes_to_array, mask_iou_matrix
from ..utils.exceptions import MatchingError

metrics_log = logging.getLogger('metrics')

IOU_KINDS = ("box", "mask")


def confidence_order(predictions: Sequence[Detection]) -> np.ndarray:
    conf = np.array([p.confidence for p in predictions], dtype=np.float64)
    return np.argsort(-conf, kind="stable")


def iou_matrix(predictions: Sequence[Detection], ground_truth: Sequence[GroundTruthInstance],
               iou_kind: str = "box", image_size: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """``(P, G)`` IoU between predictions and ground truth in one image frame."""
    if iou_kind not in IOU_KINDS:
        raise MatchingError(f"iou_kind {iou_kind!r} is not one of {', '.join(IOU_KINDS)}")
    if iou_kind == "box":
        return box_iou_matrix(boxes_to_array([p.box for p in predictions]),
                              boxes_to_array([g.box for g in ground_truth]))
    if image_size is None:
        raise MatchingError("mask IoU needs the image size")
    for p in predictions:
        if p.mask is None:
            raise MatchingError(f"prediction of class {p.class_id} in {p.image_id!r} has no mask")
    for g in ground_truth:
        if not isinstance(g.geometry, PolygonMask):
            raise MatchingError(f"ground truth of class {g.class_id} in {g.image_id!r} has no mask")
    width, height = image_size
    return mask_iou_matrix([p.mask for p in predictions], [g.geometry for g in ground_truth], width, height)


def greedy_assign(iou: np.ndarray, thresholds: Sequence[float]) -> np.ndarray:
    """
    Greedy one-to-one assignment for every threshold at once.

    ``iou`` rows must already be in processing order. Returns a ``(P, T)``
    array holding the matched ground-truth column, or -1.
    """
    thr = np.asarray(thresholds, dtype=np.float64)
    n_pred, n_gt = iou.shape
    assigned = np.full((n_pred, thr.size), -1, dtype=np.int64)
    if n_pred == 0 or n_gt == 0:
        return assigned
    available = np.ones((thr.size, n_gt), dtype=bool)
    lowest = thr.min()
    cols = np.arange(thr.size)
    for p in range(n_pred):
        row = iou[p]
        if row.max() < lowest:
            continue
        ok = available & (row[None, :] >= thr[:, None])
        cand = np.where(ok, row[None, :], -1.0)
        best = cand.argmax(axis=1)
        hit = cand[cols, best] >= 0.0
        if hit.any():
            assigned[p, hit] = best[hit]
            available[cols[hit], best[hit]] = False
    return assigned


@dataclass(frozen=True, slots=True)
class MatchedPair:
    prediction: Detection
    ground_truth: GroundTruthInstance
    iou: float


def _pred_key(d: Detection):
    return (d.image_id, d.class_id, d.box.as_tuple(), -d.confidence)


def _gt_key(g: GroundTruthInstance):
    return (g.image_id, g.class_id, g.box.as_tuple())


@dataclass(frozen=True)
class MatchResult:
    iou_threshold: float
    true_positives: Tuple[MatchedPair, ...] = ()
    false_positives: Tuple[Detection, ...] = ()
    false_negatives: Tuple[GroundTruthInstance, ...] = ()

    def class_ids(self) -> List[int]:
        ids = {p.prediction.class_id for p in self.true_positives}
        ids |= {d.class_id for d in self.false_positives}
        ids |= {g.class_id for g in self.false_negatives}
        return sorted(ids)

    def counts(self, class_id: int) -> Tuple[int, int, int]:
        """(TP, FP, FN) for one class."""
        tp = sum(1 for p in self.true_positives if p.ground_truth.class_id == class_id)
        fp = sum(1 for d in self.false_positives if d.class_id == class_id)
        fn = sum(1 for g in self.false_negatives if g.class_id == class_id)
        return tp, fp, fn

    def merge(self, other: "MatchResult") -> "MatchResult":
        """Combine results of disjoint images. Associative and order independent."""
        if self.iou_threshold != other.iou_threshold:
            raise MatchingError(f"cannot merge results at IoU {self.iou_threshold} and {other.iou_threshold}")
        return MatchResult(
            self.iou_threshold,
            tuple(sorted(self.true_positives + other.true_positives,
                         key=lambda m: (_pred_key(m.prediction), _gt_key(m.ground_truth)))),
            tuple(sorted(self.false_positives + other.false_positives, key=_pred_key)),
            tuple(sorted(self.false_negatives + other.false_negatives, key=_gt_key)),
        )


def _check_single_frame(predictions, ground_truth):
    ids = {p.image_id for p in predictions} | {g.image_id for g in ground_truth}
    ids.discard("")
    if len(ids) > 1:
        raise MatchingError(f"match_predictions works on one image, got {len(ids)}: group by image first")


def match_predictions(predictions: Sequence[Detection], ground_truth: Sequence[GroundTruthInstance],
                      iou_threshold: float = 0.5, iou_kind: str = "box",
                      image_size: Optional[Tuple[int, int]] = None) -> MatchResult:
    """Match one image's predictions to its ground truth, class by class."""
    if not 0.0 < iou_threshold < 1.0:
        raise MatchingError(f"iou_threshold must lie in (0, 1), got {iou_threshold}")
    _check_single_frame(predictions, ground_truth)
    tps: List[MatchedPair] = []
    fps: List[Detection] = []
    fns: List[GroundTruthInstance] = []
    class_ids = sorted({p.class_id for p in predictions} | {g.class_id for g in ground_truth})
    for class_id in class_ids:
        preds = [p for p in predictions if p.class_id == class_id]
        gts = [g for g in ground_truth if g.class_id == class_id]
        order = confidence_order(preds)
        preds = [preds[i] for i in order]
        iou = iou_matrix(preds, gts, iou_kind, image_size)
        assigned = greedy_assign(iou, [iou_threshold])[:, 0]
        claimed = set()
        for p_idx, g_idx in enumerate(assigned):
            if g_idx < 0:
                fps.append(preds[p_idx])
            else:
                claimed.add(int(g_idx))
                tps.append(MatchedPair(preds[p_idx], gts[g_idx], float(iou[p_idx, g_idx])))
        fns.extend(g for i, g in enumerate(gts) if i not in claimed)
    metrics_log.debug("matched %d TP / %d FP / %d FN at IoU %.2f", len(tps), len(fps), len(fns), iou_threshold)
    return MatchResult(iou_threshold, tuple(tps), tuple(fps), tuple(fns))


@dataclass
class ClassTally:
    """Per-class accumulation over images for a threshold sweep."""
    confidences: List[np.ndarray] = field(default_factory=list)
    hits: List[np.ndarray] = field(default_factory=list)
    n_gt: int = 0

    def add(self, confidences: np.ndarray, hits: np.ndarray, n_gt: int):
        self.confidences.append(confidences)
        self.hits.append(hits)
        self.n_gt += n_gt

    def ranked(self, n_thresholds: int) -> Tuple[np.ndarray, np.ndarray]:
        """Confidences and hit flags sorted by descending confidence, input order on ties."""
        if not self.confidences:
            return np.zeros(0), np.zeros((0, n_thresholds), dtype=bool)
        conf = np.concatenate(self.confidences)
        hits = np.concatenate(self.hits, axis=0)
        order = np.argsort(-conf, kind="stable")
        return conf[order], hits[order]


def tally_image(predictions: Sequence[Detection], ground_truth: Sequence[GroundTruthInstance],
                thresholds: Sequence[float], tallies: Dict[int, ClassTally],
                iou_kind: str = "box", image_size: Optional[Tuple[int, int]] = None):
    """Match one image at every threshold and add the per-class outcome to ``tallies``."""
    class_ids = {p.class_id for p in predictions} | {g.class_id for g in ground_truth}
    for class_id in class_ids:
        preds = [p for p in predictions if p.class_id == class_id]
        gts = [g for g in ground_truth if g.class_id == class_id]
        order = confidence_order(preds)
        preds = [preds[i] for i in order]
        iou = iou_matrix(preds, gts, iou_kind, image_size)
        hits = greedy_assign(iou, thresholds) >= 0
        conf = np.array([p.confidence for p in preds], dtype=np.float64)
        tallies.setdefault(class_id, ClassTally()).add(conf, hits, len(gts))
