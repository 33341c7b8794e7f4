"""
Dataset-level evaluation: threshold sweeps, confusion matrices and the
per-class report.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..core import Detection, GroundTruthInstance
from ..utils.exceptions import MatchingError
from .ap import average_precision, compute_prf, f1_score, mean_ap, precision_envelope
from .matching import ClassTally, confidence_order, greedy_assign, iou_matrix, tally_image

metrics_log = logging.getLogger('metrics')

THRESHOLDS_50_95 = tuple(float(t) for t in np.arange(50, 100, 5) / 100)
DEFAULT_CONFUSION_CONF = 0.25
DEFAULT_AP_CONF = 0.001

PerImage = Mapping[str, Sequence]
ItemsInput = Union[Sequence, PerImage]
ImageSizes = Optional[Mapping[str, Tuple[int, int]]]


def group_by_image(items: ItemsInput) -> Dict[str, List]:
    """Accept a flat sequence (grouped on ``image_id``) or an existing per-image mapping."""
    if isinstance(items, Mapping):
        return {image_id: list(values) for image_id, values in items.items()}
    grouped: Dict[str, List] = defaultdict(list)
    for item in items:
        grouped[item.image_id].append(item)
    return dict(grouped)


def _image_ids(*groups: Mapping[str, Sequence]) -> List[str]:
    ids = set()
    for group in groups:
        ids |= set(group)
    return sorted(ids)


def _check_thresholds(thresholds: Sequence[float]):
    if not thresholds:
        raise MatchingError("at least one IoU threshold is required")
    for t in thresholds:
        if not 0.0 < t < 1.0:
            raise MatchingError(f"IoU threshold {t} outside (0, 1)")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise MatchingError(f"IoU thresholds must be strictly increasing, got {list(thresholds)}")


def _size_of(image_sizes: ImageSizes, image_id: str) -> Optional[Tuple[int, int]]:
    if image_sizes is None:
        return None
    return image_sizes.get(image_id)


@dataclass(frozen=True)
class ThresholdSweep:
    thresholds: Tuple[float, ...]
    per_class_ap: Dict[int, Tuple[Optional[float], ...]]
    maps: Tuple[Optional[float], ...]
    envelopes: Dict[int, Optional[np.ndarray]] = field(default_factory=dict)

    @property
    def mean(self) -> Optional[float]:
        defined = [m for m in self.maps if m is not None]
        if not defined:
            return None
        return float(np.mean(defined))

    def class_mean(self, class_id: int) -> Optional[float]:
        aps = [ap for ap in self.per_class_ap.get(class_id, ()) if ap is not None]
        return float(np.mean(aps)) if aps else None


def map_over_thresholds(predictions: ItemsInput, ground_truth: ItemsInput,
                        thresholds: Sequence[float] = THRESHOLDS_50_95,
                        iou_kind: str = "box", image_sizes: ImageSizes = None,
                        min_confidence: float = 0.0) -> ThresholdSweep:
    """Match and score every class at each IoU threshold; mAP per threshold and their mean."""
    thresholds = tuple(float(t) for t in thresholds)
    _check_thresholds(thresholds)
    preds_by_image = group_by_image(predictions)
    gts_by_image = group_by_image(ground_truth)

    tallies: Dict[int, ClassTally] = {}
    for image_id in _image_ids(preds_by_image, gts_by_image):
        preds = [p for p in preds_by_image.get(image_id, ()) if p.confidence >= min_confidence]
        tally_image(preds, gts_by_image.get(image_id, ()), thresholds, tallies,
                    iou_kind, _size_of(image_sizes, image_id))

    per_class: Dict[int, Tuple[Optional[float], ...]] = {}
    envelopes: Dict[int, Optional[np.ndarray]] = {}
    for class_id in sorted(tallies):
        tally = tallies[class_id]
        _, hits = tally.ranked(len(thresholds))
        per_class[class_id] = tuple(average_precision(hits[:, t], tally.n_gt) for t in range(len(thresholds)))
        envelopes[class_id] = precision_envelope(hits[:, 0], tally.n_gt)

    maps = []
    for t in range(len(thresholds)):
        aps = [aps_t[t] for aps_t in per_class.values()]
        maps.append(mean_ap(aps) if any(ap is not None for ap in aps) else None)
    metrics_log.debug("threshold sweep over %d classes: %s", len(per_class), maps)
    return ThresholdSweep(thresholds, per_class, tuple(maps), envelopes)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are true classes, columns predicted classes; the last index is background."""
    class_ids: Tuple[int, ...]
    class_names: Tuple[str, ...]
    counts: np.ndarray
    confidence_threshold: float
    iou_threshold: float

    @property
    def background(self) -> int:
        return len(self.class_ids)

    def index(self, class_id: int) -> int:
        return self.class_ids.index(class_id)

    def row(self, class_id: int) -> Tuple[int, ...]:
        return tuple(int(v) for v in self.counts[self.index(class_id)])

    def ground_truth_count(self, class_id: int) -> int:
        return int(self.counts[self.index(class_id)].sum())

    def recall(self, class_id: int) -> float:
        i = self.index(class_id)
        tp = int(self.counts[i, i])
        return compute_prf(tp, 0, self.ground_truth_count(class_id) - tp)[1]

    def labels(self) -> List[str]:
        return list(self.class_names) + ["background"]

    def to_dict(self) -> Dict:
        return {
            "labels": self.labels(),
            "counts": self.counts.astype(int).tolist(),
            "confidence_threshold": self.confidence_threshold,
            "iou_threshold": self.iou_threshold,
        }


def confusion_matrix(predictions: ItemsInput, ground_truth: ItemsInput,
                     class_map: Optional[Mapping[int, str]] = None,
                     confidence_threshold: float = DEFAULT_CONFUSION_CONF,
                     iou_threshold: float = 0.5, iou_kind: str = "box",
                     image_sizes: ImageSizes = None) -> ConfusionMatrix:
    """
    Detection confusion matrix with a background pseudo-class.

    Matching is class agnostic so a box found under the wrong label lands
    off the diagonal instead of counting as a miss plus a false alarm.
    """
    if not 0.0 < iou_threshold < 1.0:
        raise MatchingError(f"iou_threshold must lie in (0, 1), got {iou_threshold}")
    if not 0.0 <= confidence_threshold < 1.0:
        raise MatchingError(f"confidence_threshold must lie in [0, 1), got {confidence_threshold}")
    preds_by_image = group_by_image(predictions)
    gts_by_image = group_by_image(ground_truth)
    if class_map is None:
        seen = {x.class_id for group in (*preds_by_image.values(), *gts_by_image.values()) for x in group}
        class_map = {c: str(c) for c in sorted(seen)}
    class_ids = tuple(sorted(class_map))
    slot = {c: i for i, c in enumerate(class_ids)}
    bg = len(class_ids)
    counts = np.zeros((bg + 1, bg + 1), dtype=np.int64)

    def _slot(class_id: int) -> int:
        if class_id not in slot:
            raise MatchingError(f"class id {class_id} not in the class map")
        return slot[class_id]

    for image_id in _image_ids(preds_by_image, gts_by_image):
        preds = [p for p in preds_by_image.get(image_id, ()) if p.confidence >= confidence_threshold]
        gts = list(gts_by_image.get(image_id, ()))
        preds = [preds[i] for i in confidence_order(preds)]
        iou = iou_matrix(preds, gts, iou_kind, _size_of(image_sizes, image_id))
        assigned = greedy_assign(iou, [iou_threshold])[:, 0]
        claimed = set()
        for p_idx, g_idx in enumerate(assigned):
            pred_slot = _slot(preds[p_idx].class_id)
            if g_idx < 0:
                counts[bg, pred_slot] += 1
            else:
                claimed.add(int(g_idx))
                counts[_slot(gts[g_idx].class_id), pred_slot] += 1
        for g_idx, gt in enumerate(gts):
            if g_idx not in claimed:
                counts[_slot(gt.class_id), bg] += 1
    return ConfusionMatrix(class_ids, tuple(class_map[c] for c in class_ids), counts,
                           confidence_threshold, iou_threshold)


@dataclass(frozen=True)
class ClassMetrics:
    class_id: int
    name: str
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    ap50: Optional[float]
    ap50_95: Optional[float]

    @property
    def active(self) -> bool:
        return self.tp + self.fp + self.fn > 0


@dataclass(frozen=True)
class EvalReport:
    classes: Tuple[ClassMetrics, ...]
    precision: float
    recall: float
    f1: float
    map50: Optional[float]
    map50_95: Optional[float]
    iou_threshold: float
    confidence_threshold: float
    ap_confidence_threshold: float
    iou_kind: str

    def for_class(self, class_id: int) -> ClassMetrics:
        for c in self.classes:
            if c.class_id == class_id:
                return c
        raise KeyError(class_id)


@dataclass(frozen=True)
class Evaluation:
    report: EvalReport
    confusion: ConfusionMatrix
    sweep: ThresholdSweep


def evaluate(predictions: ItemsInput, ground_truth: ItemsInput, class_map: Mapping[int, str],
             iou_threshold: float = 0.5, confidence_threshold: float = DEFAULT_CONFUSION_CONF,
             ap_confidence_threshold: float = DEFAULT_AP_CONF, iou_kind: str = "box",
             image_sizes: ImageSizes = None) -> Evaluation:
    """
    Full metric suite for one dataset.

    P/R/F1 and the confusion matrix use predictions at or above
    ``confidence_threshold`` matched at ``iou_threshold``; AP ranks every
    prediction at or above ``ap_confidence_threshold`` over IoU 0.50:0.95.
    The aggregate F1 is the harmonic mean of the macro precision and recall.
    """
    preds_by_image = group_by_image(predictions)
    gts_by_image = group_by_image(ground_truth)

    # class-aware counts at the reporting threshold
    tallies: Dict[int, ClassTally] = {}
    for image_id in _image_ids(preds_by_image, gts_by_image):
        preds = [p for p in preds_by_image.get(image_id, ()) if p.confidence >= confidence_threshold]
        tally_image(preds, gts_by_image.get(image_id, ()), [iou_threshold], tallies,
                    iou_kind, _size_of(image_sizes, image_id))

    sweep = map_over_thresholds(preds_by_image, gts_by_image, THRESHOLDS_50_95, iou_kind,
                                image_sizes, min_confidence=ap_confidence_threshold)
    confusion = confusion_matrix(preds_by_image, gts_by_image, class_map, confidence_threshold,
                                 iou_threshold, iou_kind, image_sizes)

    rows = []
    for class_id in sorted(class_map):
        tally = tallies.get(class_id, ClassTally())
        _, hits = tally.ranked(1)
        tp = int(hits[:, 0].sum())
        fp = int(hits.shape[0] - tp)
        fn = tally.n_gt - tp
        p, r, f1 = compute_prf(tp, fp, fn)
        aps = sweep.per_class_ap.get(class_id, ())
        rows.append(ClassMetrics(class_id, class_map[class_id], tp, fp, fn, p, r, f1,
                                 aps[0] if aps else None, sweep.class_mean(class_id)))

    active = [c for c in rows if c.active] or rows
    macro_p = float(np.mean([c.precision for c in active])) if active else 1.0
    macro_r = float(np.mean([c.recall for c in active])) if active else 1.0
    report = EvalReport(
        classes=tuple(rows),
        precision=macro_p,
        recall=macro_r,
        f1=f1_score(macro_p, macro_r),
        map50=sweep.maps[0],
        map50_95=sweep.mean,
        iou_threshold=iou_threshold,
        confidence_threshold=confidence_threshold,
        ap_confidence_threshold=ap_confidence_threshold,
        iou_kind=iou_kind,
    )
    metrics_log.info("evaluated %d images: P=%.4f R=%.4f mAP50=%s", len(_image_ids(preds_by_image, gts_by_image)),
                     macro_p, macro_r, report.map50)
    return Evaluation(report, confusion, sweep)
