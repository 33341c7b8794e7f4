"""
Annotated copies of input images: truck boxes, axle ordinals, lifted axles highlighted.
"""
from __future__ import annotations

import io
from pathlib import Path
from typing import Optional, Sequence

from PIL import Image, ImageDraw, ImageFont

from ..cascade import CascadeResult
from ..core import Detection

IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png", ".bmp")

TRUCK_COLOR = (0, 90, 255)
AXLE_COLOR = (255, 140, 0)
LIFTED_COLOR = (160, 32, 240)
ORPHAN_COLOR = (128, 128, 128)


def find_image(images_dir: Path, image_id: str) -> Optional[Path]:
    for suffix in IMAGE_SUFFIXES:
        candidate = images_dir / f"{image_id}{suffix}"
        if candidate.is_file():
            return candidate
    return None


def render_overlay(image: Image.Image, result: CascadeResult,
                   lifted_masks: Sequence[Detection] = ()) -> Image.Image:
    canvas = image.convert("RGB")
    draw = ImageDraw.Draw(canvas)
    font = ImageFont.load_default()
    for record in result.records:
        draw.rectangle(record.truck.box.as_tuple(), outline=TRUCK_COLOR, width=3)
        draw.text((record.truck.box.x_min + 4, record.truck.box.y_min + 4),
                  f"truck {record.truck.confidence:.2f} / {record.axle_count} axles", fill=TRUCK_COLOR, font=font)
        for axle in record.axles:
            box = axle.detection.box
            color = LIFTED_COLOR if axle.lifted else AXLE_COLOR
            draw.rectangle(box.as_tuple(), outline=color, width=3 if axle.lifted else 2)
            draw.text((box.x_min + 2, box.y_min - 12), str(axle.ordinal), fill=color, font=font)
    for mask in lifted_masks:
        if mask.mask is not None:
            draw.polygon(list(mask.mask.vertices), outline=LIFTED_COLOR)
    for orphan in result.orphans:
        draw.rectangle(orphan.box.as_tuple(), outline=ORPHAN_COLOR, width=1)
    return canvas


def overlay_png(image_path: Path, result: CascadeResult, lifted_masks: Sequence[Detection] = ()) -> bytes:
    with Image.open(image_path) as image:
        canvas = render_overlay(image, result, lifted_masks)
    buf = io.BytesIO()
    canvas.save(buf, format="PNG")
    return buf.getvalue()
