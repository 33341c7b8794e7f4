"""
Greedy non-maximum suppression, applied per class.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Dict, List, Sequence

import numpy as np

from ..core import Detection
from ..geometry import box_iou_matrix, boxes_to_array


def _check_threshold(iou_threshold: float):
    if not 0.0 < iou_threshold < 1.0:
        raise ValueError(f"iou_threshold must lie in (0, 1), got {iou_threshold}")


def nms(detections: Sequence[Detection], iou_threshold: float = 0.5) -> List[Detection]:
    """
    Keep a detection iff its IoU with every already kept one is below
    ``iou_threshold``. Visits by descending confidence, input order on ties.
    """
    _check_threshold(iou_threshold)
    if not detections:
        return []
    conf = np.array([d.confidence for d in detections], dtype=np.float64)
    order = np.argsort(-conf, kind="stable")
    boxes = boxes_to_array([d.box for d in detections])
    iou = box_iou_matrix(boxes, boxes)

    suppressed = np.zeros(len(detections), dtype=bool)
    kept: List[Detection] = []
    for i in order:
        if suppressed[i]:
            continue
        kept.append(detections[i])
        suppressed |= iou[i] >= iou_threshold
    return kept


def nms_per_class(detections: Sequence[Detection], iou_threshold: float = 0.5) -> List[Detection]:
    """Run :func:`nms` independently per class id; result ordered by class, then confidence."""
    _check_threshold(iou_threshold)
    by_class: Dict[int, List[Detection]] = defaultdict(list)
    for det in detections:
        by_class[det.class_id].append(det)
    kept: List[Detection] = []
    for class_id in sorted(by_class):
        kept.extend(nms(by_class[class_id], iou_threshold))
    return kept
