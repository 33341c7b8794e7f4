from .box import BoundingBox, box_iou, box_iou_matrix, boxes_to_array
from .mask import BitGrid, PolygonMask, rasterize_polygon, mask_iou, mask_iou_matrix, grid_iou
from .letterbox import LetterboxTransform, letterbox

__all__ = [
    "BoundingBox",
    "box_iou",
    "box_iou_matrix",
    "boxes_to_array",
    "BitGrid",
    "PolygonMask",
    "rasterize_polygon",
    "mask_iou",
    "mask_iou_matrix",
    "grid_iou",
    "LetterboxTransform",
    "letterbox",
]
