from .labels import (
    LabelFormat,
    DetectionLabelFormat,
    SegmentationLabelFormat,
    LABEL_FORMATS,
    parse_detection_labels,
    parse_segmentation_labels,
    write_labels,
)
from .dataset import (
    ManifestEntry,
    DatasetManifest,
    AxleCountTable,
    SPLIT_TAGS,
    AXLE_COUNT_RANGE,
    split_dataset,
    summarize_dataset,
    axle_counts_from_instances,
)
from .training import TrainingConfig, MODEL_KINDS, TRAINING_KEYS, build_training_config, emit_training_config

__all__ = [
    "LabelFormat",
    "DetectionLabelFormat",
    "SegmentationLabelFormat",
    "LABEL_FORMATS",
    "parse_detection_labels",
    "parse_segmentation_labels",
    "write_labels",
    "ManifestEntry",
    "DatasetManifest",
    "AxleCountTable",
    "SPLIT_TAGS",
    "AXLE_COUNT_RANGE",
    "split_dataset",
    "summarize_dataset",
    "axle_counts_from_instances",
    "TrainingConfig",
    "MODEL_KINDS",
    "TRAINING_KEYS",
    "build_training_config",
    "emit_training_config",
]
