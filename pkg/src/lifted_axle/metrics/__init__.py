from .matching import (
    IOU_KINDS,
    MatchedPair,
    MatchResult,
    ClassTally,
    match_predictions,
    greedy_assign,
    iou_matrix,
    tally_image,
)
from .ap import (
    RECALL_POINTS,
    compute_prf,
    f1_score,
    precision_envelope,
    average_precision,
    average_precision_reference,
    mean_ap,
)
from .evaluate import (
    THRESHOLDS_50_95,
    DEFAULT_CONFUSION_CONF,
    DEFAULT_AP_CONF,
    ThresholdSweep,
    ConfusionMatrix,
    ClassMetrics,
    EvalReport,
    Evaluation,
    group_by_image,
    map_over_thresholds,
    confusion_matrix,
    evaluate,
)
from .report import REPORT_FORMATS, report_to_dict, format_report, format_confusion, envelope_csv

__all__ = [
    "IOU_KINDS",
    "MatchedPair",
    "MatchResult",
    "ClassTally",
    "match_predictions",
    "greedy_assign",
    "iou_matrix",
    "tally_image",
    "RECALL_POINTS",
    "compute_prf",
    "f1_score",
    "precision_envelope",
    "average_precision",
    "average_precision_reference",
    "mean_ap",
    "THRESHOLDS_50_95",
    "DEFAULT_CONFUSION_CONF",
    "DEFAULT_AP_CONF",
    "ThresholdSweep",
    "ConfusionMatrix",
    "ClassMetrics",
    "EvalReport",
    "Evaluation",
    "group_by_image",
    "map_over_thresholds",
    "confusion_matrix",
    "evaluate",
    "REPORT_FORMATS",
    "report_to_dict",
    "format_report",
    "format_confusion",
    "envelope_csv",
]
