"""
Precision, recall, F1 and 101-point interpolated average precision.
"""
from __future__ import annotations

from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from ..utils.exceptions import UndefinedAveragePrecisionError

# 0.00, 0.01, ..., 1.00 as exact quotients
RECALL_POINTS = np.arange(101) / 100


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def compute_prf(tp: int, fp: int, fn: int) -> Tuple[float, float, float]:
    """
    Precision, recall and F1 from match counts.

    An empty denominator yields 0, except the vacuous case with no
    predictions and no ground truth, which scores 1 everywhere.
    """
    if tp < 0 or fp < 0 or fn < 0:
        raise ValueError(f"counts must be non-negative, got tp={tp} fp={fp} fn={fn}")
    if tp == 0 and fp == 0 and fn == 0:
        return 1.0, 1.0, 1.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return precision, recall, f1_score(precision, recall)


def _curve(hits: np.ndarray, total_gt: int) -> Tuple[np.ndarray, np.ndarray]:
    tp = np.cumsum(hits, dtype=np.int64)
    fp = np.cumsum(~hits, dtype=np.int64)
    return tp / (tp + fp), tp / total_gt


def precision_envelope(hits: Sequence[bool], total_gt: int) -> Optional[np.ndarray]:
    """
    Interpolated precision at each of the 101 recall points.

    ``hits`` are TP flags ranked by descending confidence. The value at
    recall ``r`` is the best precision reached at any recall >= ``r``.
    Returns None when there is no ground truth.
    """
    if total_gt <= 0:
        return None
    hits = np.asarray(hits, dtype=bool)
    out = np.zeros(RECALL_POINTS.size, dtype=np.float64)
    if hits.size == 0:
        return out
    precision, recall = _curve(hits, total_gt)
    # running max from the tail: best precision at index >= i
    best_after = np.maximum.accumulate(precision[::-1])[::-1]
    first = np.searchsorted(recall, RECALL_POINTS, side="left")
    reached = first < recall.size
    out[reached] = best_after[first[reached]]
    return out


def average_precision(hits: Sequence[bool], total_gt: int) -> Optional[float]:
    """101-point interpolated AP, or None when the class has no ground truth."""
    envelope = precision_envelope(hits, total_gt)
    if envelope is None:
        return None
    return float(np.mean(envelope))


def average_precision_reference(hits: Sequence[bool], total_gt: int) -> Optional[float]:
    """Brute-force AP: scans every ranked point for every recall level."""
    if total_gt <= 0:
        return None
    hits = np.asarray(hits, dtype=bool)
    if hits.size == 0:
        return 0.0
    precision, recall = _curve(hits, total_gt)
    points = np.zeros(RECALL_POINTS.size, dtype=np.float64)
    for k, level in enumerate(RECALL_POINTS):
        best = 0.0
        for p, r in zip(precision, recall):
            if r >= level and p > best:
                best = p
        points[k] = best
    return float(np.mean(points))


def mean_ap(per_class_aps: Iterable[Optional[float]]) -> float:
    """Arithmetic mean over classes whose AP is defined."""
    defined = [ap for ap in per_class_aps if ap is not None]
    if not defined:
        raise UndefinedAveragePrecisionError()
    return float(np.mean(defined))
