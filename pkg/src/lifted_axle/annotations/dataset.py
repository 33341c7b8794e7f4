"""
Dataset manifests: image entries, label references, split tags and the
per-source axle-count summary.
"""
from __future__ import annotations

import json
import logging
import os
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..cascade import group_axles_by_truck
from ..core import Detection, GroundTruthInstance, TRUCK_AXLE_CLASSES, class_map_from_obj
from ..utils.exceptions import DatasetError, InputNotFoundError, LabelParseError
from .labels import LABEL_FORMATS

annotations_log = logging.getLogger('annotations')

SPLIT_TAGS = ("train", "val", "unassigned")
AXLE_COUNT_RANGE = tuple(range(2, 10))


@dataclass(frozen=True, slots=True)
class ManifestEntry:
    image_id: str
    width: int
    height: int
    label_path: str
    split: str = "unassigned"
    source: Optional[str] = None

    def to_obj(self) -> Dict:
        obj = {
            "image_id": self.image_id,
            "width": self.width,
            "height": self.height,
            "label_path": self.label_path,
            "split": self.split,
        }
        if self.source is not None:
            obj["source"] = self.source
        return obj

    @classmethod
    def from_obj(cls, data: Dict, index: int) -> "ManifestEntry":
        where = f"entries[{index}]"
        if not isinstance(data, dict):
            raise DatasetError(f"{where}: expected an object")
        missing = {"image_id", "width", "height", "label_path"} - data.keys()
        if missing:
            raise DatasetError(f"{where}: missing fields {sorted(missing)}")
        unknown = data.keys() - {"image_id", "width", "height", "label_path", "split", "source"}
        if unknown:
            raise DatasetError(f"{where}: unknown fields {sorted(unknown)}")
        for key in ("width", "height"):
            value = data[key]
            if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
                raise DatasetError(f"{where}.{key}: expected a positive integer, got {value!r}")
        if not isinstance(data["image_id"], str) or not data["image_id"]:
            raise DatasetError(f"{where}.image_id: expected a non-empty string")
        if not isinstance(data["label_path"], str):
            raise DatasetError(f"{where}.label_path: expected a string")
        split = data.get("split", "unassigned")
        if split not in SPLIT_TAGS:
            raise DatasetError(f"{where}.split: {split!r} is not one of {', '.join(SPLIT_TAGS)}")
        source = data.get("source")
        if source is not None and not isinstance(source, str):
            raise DatasetError(f"{where}.source: expected a string")
        return cls(data["image_id"], data["width"], data["height"], data["label_path"], split, source)


@dataclass(frozen=True)
class DatasetManifest:
    entries: Tuple[ManifestEntry, ...]
    class_map: Dict[int, str] = field(default_factory=lambda: dict(TRUCK_AXLE_CLASSES))
    root: Optional[Path] = None
    explicit_class_map: bool = False

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        seen = set()
        for entry in self.entries:
            if entry.image_id in seen:
                raise DatasetError(f"duplicate image_id {entry.image_id!r}")
            seen.add(entry.image_id)

    def __len__(self) -> int:
        return len(self.entries)

    def image_sizes(self) -> Dict[str, Tuple[int, int]]:
        return {e.image_id: (e.width, e.height) for e in self.entries}

    def split_counts(self) -> Dict[str, int]:
        counts = Counter(e.split for e in self.entries)
        return {tag: counts.get(tag, 0) for tag in SPLIT_TAGS}

    def with_entries(self, entries: Sequence[ManifestEntry]) -> "DatasetManifest":
        return replace(self, entries=tuple(entries))

    def label_file(self, entry: ManifestEntry) -> Path:
        path = Path(entry.label_path)
        if not path.is_absolute() and self.root is not None:
            path = self.root / path
        return path

    def load_ground_truth(self, kind: str = "detection", split: Optional[str] = None) -> Dict[str, List[GroundTruthInstance]]:
        """Parse every referenced label file. ``kind`` is ``detection`` or ``segmentation``."""
        if kind not in LABEL_FORMATS:
            raise DatasetError(f"label kind {kind!r} is not one of {', '.join(LABEL_FORMATS)}")
        fmt = LABEL_FORMATS[kind](self.class_map)
        out: Dict[str, List[GroundTruthInstance]] = {}
        for entry in self.entries:
            if split is not None and entry.split != split:
                continue
            path = self.label_file(entry)
            if not path.is_file():
                raise InputNotFoundError(str(path))
            try:
                out[entry.image_id] = fmt.parse(path.read_text(encoding="utf-8"),
                                                entry.width, entry.height, entry.image_id)
            except LabelParseError as e:
                raise DatasetError(f"{path}: {e.message}") from e
        annotations_log.debug("loaded ground truth for %d images", len(out))
        return out

    def to_obj(self, target_dir: Optional[Path] = None):
        """``target_dir`` rebases relative label paths for a manifest written elsewhere."""
        entries = [self._relocated(e, target_dir).to_obj() for e in self.entries]
        if not self.explicit_class_map:
            return entries
        return {"class_map": {str(k): v for k, v in self.class_map.items()}, "entries": entries}

    def to_json(self, target_dir: Optional[Path] = None) -> str:
        return json.dumps(self.to_obj(target_dir), ensure_ascii=False, indent=2) + "\n"

    def _relocated(self, entry: ManifestEntry, target_dir: Optional[Path]) -> ManifestEntry:
        if target_dir is None or self.root is None or Path(entry.label_path).is_absolute():
            return entry
        rel = os.path.relpath(self.label_file(entry), target_dir)
        return replace(entry, label_path=Path(rel).as_posix())

    @classmethod
    def from_obj(cls, data, root: Optional[Path] = None,
                 class_map: Optional[Mapping[int, str]] = None) -> "DatasetManifest":
        explicit = isinstance(data, dict)
        if explicit:
            if "entries" not in data:
                raise DatasetError("manifest object missing 'entries'")
            class_map = class_map_from_obj(data["class_map"]) if "class_map" in data else class_map
            items = data["entries"]
        else:
            items = data
        if not isinstance(items, list):
            raise DatasetError("manifest entries must be a JSON array")
        entries = [ManifestEntry.from_obj(item, i) for i, item in enumerate(items)]
        return cls(tuple(entries), dict(class_map or TRUCK_AXLE_CLASSES), root, explicit and "class_map" in data)

    @classmethod
    def from_json(cls, text: str, root: Optional[Path] = None,
                  class_map: Optional[Mapping[int, str]] = None) -> "DatasetManifest":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise DatasetError(f"invalid manifest JSON: {e}") from e
        return cls.from_obj(data, root, class_map)

    @classmethod
    def load(cls, path, class_map: Optional[Mapping[int, str]] = None) -> "DatasetManifest":
        path = Path(path)
        if not path.is_file():
            raise InputNotFoundError(str(path))
        return cls.from_json(path.read_text(encoding="utf-8"), path.parent, class_map)


def split_dataset(manifest: DatasetManifest, train_fraction: float = 0.8, seed: int = 0,
                  reassign: bool = False) -> DatasetManifest:
    """
    Tag ``round(n * train_fraction)`` entries as train and the rest as val.

    The assignment depends only on ``seed`` and the sorted image ids, never on
    entry order. ``round`` breaks ties to even.
    """
    if not 0.0 < train_fraction < 1.0:
        raise DatasetError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if len(manifest) == 0:
        raise DatasetError("cannot split an empty manifest")
    if not reassign and any(e.split != "unassigned" for e in manifest.entries):
        raise DatasetError("manifest already has split tags; pass reassign to overwrite them")

    ids = sorted(e.image_id for e in manifest.entries)
    n_train = round(len(ids) * train_fraction)
    order = np.random.default_rng(seed).permutation(len(ids))
    train_ids = {ids[i] for i in order[:n_train]}
    entries = [replace(e, split="train" if e.image_id in train_ids else "val") for e in manifest.entries]
    annotations_log.info("split %d images: %d train / %d val (seed %d)",
                         len(ids), n_train, len(ids) - n_train, seed)
    return manifest.with_entries(entries)


@dataclass
class AxleCountTable:
    """Trucks counted by source tag and axle count."""
    rows: Dict[str, Counter] = field(default_factory=dict)

    def add(self, source: str, axle_count: int, n: int = 1):
        self.rows.setdefault(source, Counter())[axle_count] += n

    def count(self, source: str, axle_count: int) -> int:
        return self.rows.get(source, Counter()).get(axle_count, 0)

    def row(self, source: str) -> Dict[int, int]:
        return {k: v for k, v in sorted(self.rows.get(source, Counter()).items()) if v}

    def trucks(self, source: str) -> int:
        return sum(self.rows.get(source, Counter()).values())

    @property
    def total(self) -> int:
        return sum(self.trucks(s) for s in self.rows)

    @property
    def columns(self) -> Tuple[int, ...]:
        observed = {k for counts in self.rows.values() for k in counts}
        return tuple(sorted(set(AXLE_COUNT_RANGE) | observed))

    def to_dict(self) -> Dict:
        return {
            "columns": list(self.columns),
            "rows": {s: {str(k): self.count(s, k) for k in self.columns} for s in sorted(self.rows)},
            "total": self.total,
        }

    def to_markdown(self) -> str:
        cols = self.columns
        lines = ["| Source | " + " | ".join(f"{k}-axles" for k in cols) + " |",
                 "|---|" + "---|" * len(cols)]
        for source in sorted(self.rows):
            cells = [str(self.count(source, k)) if self.count(source, k) else "-" for k in cols]
            lines.append(f"| {source} ({self.trucks(source)} trucks) | " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        cols = self.columns
        lines = ["source," + ",".join(str(k) for k in cols)]
        for source in sorted(self.rows):
            lines.append(source + "," + ",".join(str(self.count(source, k)) for k in cols))
        return "\n".join(lines) + "\n"


def summarize_dataset(manifest: DatasetManifest, axle_counts: Mapping[str, Sequence[int]]) -> AxleCountTable:
    """
    Count trucks per (source tag, axle count).

    ``axle_counts`` maps image ids to the axle count of every truck in that
    image; images missing from the manifest are ignored.
    """
    table = AxleCountTable()
    for entry in manifest.entries:
        for count in axle_counts.get(entry.image_id, ()):
            table.add(entry.source or "unspecified", int(count))
    return table


def axle_counts_from_instances(instances: Sequence[GroundTruthInstance],
                               truck_class: int = 0, axle_class: int = 1) -> List[int]:
    """Axle count per truck, grouping axle boxes under truck boxes with the cascade rule."""
    trucks = [Detection(i.class_id, i.box, 1.0, i.image_id) for i in instances if i.class_id == truck_class]
    axles = [Detection(i.class_id, i.box, 1.0, i.image_id) for i in instances if i.class_id == axle_class]
    grouping = group_axles_by_truck(trucks, axles)
    return [len(group) for group in grouping.groups]
