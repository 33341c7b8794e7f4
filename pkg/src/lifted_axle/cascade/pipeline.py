"""
Truck / axle / lifted-axle cascade for one image.

Axles are grouped under the truck whose box contains the axle center,
ordered from the steer axle according to the travel direction, and lifted
axle masks are attached to the axle box they overlap most.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core import Detection
from ..geometry import BoundingBox, box_iou, box_iou_matrix, boxes_to_array
from .config import DIRECTIONS, CascadeConfig
from .records import AxleRecord, CascadeResult, TruckRecord

cascade_log = logging.getLogger('cascade')


@dataclass(frozen=True)
class AxleGrouping:
    groups: Tuple[Tuple[Detection, ...], ...]
    orphans: Tuple[Detection, ...]

    @property
    def grouped_count(self) -> int:
        return sum(len(g) for g in self.groups)


def group_axles_by_truck(trucks: Sequence[Detection], axles: Sequence[Detection]) -> AxleGrouping:
    """
    Assign every axle to the truck containing its box center.

    Several containing trucks: highest axle/truck IoU, then smallest
    ``x_min``, then input order. Axles inside no truck are orphans.
    """
    groups: List[List[Detection]] = [[] for _ in trucks]
    orphans: List[Detection] = []
    for axle in axles:
        cx, cy = axle.box.center
        best: Optional[Tuple[float, float, int]] = None
        for t_idx, truck in enumerate(trucks):
            if not truck.box.contains_point(cx, cy):
                continue
            key = (-box_iou(axle.box, truck.box), truck.box.x_min, t_idx)
            if best is None or key < best:
                best = key
        if best is None:
            orphans.append(axle)
        else:
            groups[best[2]].append(axle)
    return AxleGrouping(tuple(tuple(g) for g in groups), tuple(orphans))


@dataclass(frozen=True)
class OrderedAxle:
    ordinal: int
    detection: Detection


def order_axles(group: Sequence[Detection], direction: str = "front-right") -> List[OrderedAxle]:
    """Ordinal 1 is the axle nearest the front: rightmost for ``front-right``, leftmost for ``front-left``."""
    if direction not in DIRECTIONS:
        raise ValueError(f"direction {direction!r} is not one of {', '.join(DIRECTIONS)}")
    sign = -1.0 if direction == "front-right" else 1.0
    ranked = sorted(group, key=lambda d: sign * d.box.center[0])
    return [OrderedAxle(i + 1, det) for i, det in enumerate(ranked)]


def _mask_box(det: Detection) -> BoundingBox:
    return det.mask.bounding_box() if det.mask is not None else det.box


@dataclass(frozen=True)
class LiftAssignment:
    """``masks[i]`` is the lifted-axle detection attached to axle ``i``, or None."""
    masks: Tuple[Optional[Detection], ...]
    unassociated: int

    @property
    def lifted(self) -> List[bool]:
        return [m is not None for m in self.masks]


def mark_lifted_axles(axles: Sequence[Detection], masks: Sequence[Detection],
                      floor: float = 0.3) -> LiftAssignment:
    """
    Attach lifted-axle masks to axle boxes by bounding-box IoU.

    Each mask targets the axle of maximal IoU at or above ``floor`` (first axle
    on ties). An axle keeps only the mask with the highest IoU, then the
    highest confidence, then the earliest; every other mask is unassociated.
    """
    attached: List[Optional[Detection]] = [None] * len(axles)
    if not masks:
        return LiftAssignment(tuple(attached), 0)
    if not axles:
        return LiftAssignment((), len(masks))

    iou = box_iou_matrix(boxes_to_array([_mask_box(m) for m in masks]),
                         boxes_to_array([a.box for a in axles]))
    best_axle = iou.argmax(axis=1)
    best_iou = iou[np.arange(len(masks)), best_axle]

    winner: List[Optional[Tuple[float, float, int]]] = [None] * len(axles)
    unassociated = 0
    for m_idx, mask in enumerate(masks):
        if best_iou[m_idx] < floor:
            unassociated += 1
            continue
        a_idx = int(best_axle[m_idx])
        key = (-float(best_iou[m_idx]), -mask.confidence, m_idx)
        if winner[a_idx] is not None:
            unassociated += 1
            if key > winner[a_idx]:
                continue
        winner[a_idx] = key
        attached[a_idx] = mask
    return LiftAssignment(tuple(attached), unassociated)


def _filter(dets: Sequence[Detection], threshold: float) -> List[Detection]:
    return [d for d in dets if d.confidence >= threshold]


def run_cascade(trucks: Sequence[Detection], axles: Sequence[Detection],
                lifted_masks: Sequence[Detection], config: Optional[CascadeConfig] = None) -> CascadeResult:
    """Compose the three stages for one image. Deterministic for fixed inputs and config."""
    config = config or CascadeConfig()
    trucks = _filter(trucks, config.truck_conf)
    axles = _filter(axles, config.axle_conf)
    lifted_masks = _filter(lifted_masks, config.lifted_conf)

    grouping = group_axles_by_truck(trucks, axles)
    ordered = [order_axles(group, config.direction) for group in grouping.groups]

    # orphans stay candidates: a mask that targets one is unassociated
    candidates = [o.detection for group in ordered for o in group] + list(grouping.orphans)
    assignment = mark_lifted_axles(candidates, lifted_masks, config.association_iou)
    orphan_hits = sum(1 for m in assignment.masks[grouping.grouped_count:] if m is not None)
    unassociated = assignment.unassociated + orphan_hits

    records = []
    cursor = 0
    for truck, group in zip(trucks, ordered):
        axle_records = []
        for o in group:
            mask = assignment.masks[cursor]
            cursor += 1
            axle_records.append(AxleRecord(o.ordinal, o.detection, mask is not None,
                                           None if mask is None else mask.confidence))
        records.append(TruckRecord(truck, tuple(axle_records), len(grouping.orphans), unassociated, config.direction))

    if grouping.orphans:
        cascade_log.warning("%d axle(s) outside every truck box", len(grouping.orphans))
    if unassociated:
        cascade_log.warning("%d lifted-axle mask(s) not associated with a truck axle", unassociated)
    cascade_log.debug("cascade: %d trucks, %d axles, %d lifted", len(records), grouping.grouped_count,
                      sum(len(r.lifted_ordinals) for r in records))
    return CascadeResult(tuple(records), grouping.orphans, unassociated, config.direction)


def mirror_detections(dets: Sequence[Detection], image_w: float) -> List[Detection]:
    """Reflect detections about the vertical midline of the image."""
    return [d.mirror_x(image_w) for d in dets]
