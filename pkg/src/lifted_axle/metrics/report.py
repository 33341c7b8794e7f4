"""
Rendering of reports and confusion matrices. All numbers carry 4 decimals.
"""
from __future__ import annotations

import csv
import io
import json
from typing import Dict, Iterable, List, Mapping, Optional

import numpy as np

from .ap import RECALL_POINTS
from .evaluate import ConfusionMatrix, EvalReport, ThresholdSweep

REPORT_FORMATS = ("json", "markdown", "csv")
REPORT_COLUMNS = ("Precision", "Recall", "F1-score", "mAP50", "mAP50-95")


def _r4(value: Optional[float]) -> Optional[float]:
    return None if value is None else round(float(value), 4)


def _cell(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.4f}"


def report_to_dict(report: EvalReport) -> Dict:
    return {
        "iou_kind": report.iou_kind,
        "iou_threshold": report.iou_threshold,
        "confidence_threshold": report.confidence_threshold,
        "ap_confidence_threshold": report.ap_confidence_threshold,
        "all": {
            "precision": _r4(report.precision),
            "recall": _r4(report.recall),
            "f1": _r4(report.f1),
            "map50": _r4(report.map50),
            "map50_95": _r4(report.map50_95),
        },
        "classes": [
            {
                "class_id": c.class_id,
                "name": c.name,
                "tp": c.tp,
                "fp": c.fp,
                "fn": c.fn,
                "precision": _r4(c.precision),
                "recall": _r4(c.recall),
                "f1": _r4(c.f1),
                "ap50": _r4(c.ap50),
                "ap50_95": _r4(c.ap50_95),
            }
            for c in report.classes
        ],
    }


def _report_rows(report: EvalReport) -> List[List[str]]:
    rows = [["all", _cell(report.precision), _cell(report.recall), _cell(report.f1),
             _cell(report.map50), _cell(report.map50_95)]]
    for c in report.classes:
        rows.append([c.name, _cell(c.precision), _cell(c.recall), _cell(c.f1), _cell(c.ap50), _cell(c.ap50_95)])
    return rows


def _markdown_table(header: Iterable[str], rows: Iterable[Iterable[str]]) -> str:
    header = list(header)
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(row) + " |" for row in rows]
    return "\n".join(lines) + "\n"


def _csv_text(header: Iterable[str], rows: Iterable[Iterable[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    writer.writerows(rows)
    return buf.getvalue()


def _run_json(run: Optional[Mapping]) -> str:
    return json.dumps(run, ensure_ascii=False, sort_keys=True)


def format_report(report: EvalReport, fmt: str = "json", run: Optional[Mapping] = None) -> str:
    """Render ``report``; ``run`` (a run manifest) is embedded when given."""
    if fmt == "json":
        body = {"report": report_to_dict(report)}
        if run is not None:
            body = {"run": dict(run), **body}
        return json.dumps(body, ensure_ascii=False, indent=2) + "\n"
    if fmt == "markdown":
        text = _markdown_table(("Class",) + REPORT_COLUMNS, _report_rows(report))
        return text if run is None else f"<!-- run: {_run_json(run)} -->\n{text}"
    if fmt == "csv":
        text = _csv_text(("class",) + REPORT_COLUMNS, _report_rows(report))
        return text if run is None else f"# run: {_run_json(run)}\n{text}"
    raise ValueError(f"format {fmt!r} is not one of {', '.join(REPORT_FORMATS)}")


def format_confusion(cm: ConfusionMatrix, fmt: str = "json", run: Optional[Mapping] = None) -> str:
    labels = cm.labels()
    rows = [[label] + [str(int(v)) for v in cm.counts[i]] for i, label in enumerate(labels)]
    if fmt == "json":
        body = {"confusion_matrix": cm.to_dict()}
        if run is not None:
            body = {"run": dict(run), **body}
        return json.dumps(body, ensure_ascii=False, indent=2) + "\n"
    if fmt == "markdown":
        text = _markdown_table(["true \\ predicted"] + labels, rows)
        return text if run is None else f"<!-- run: {_run_json(run)} -->\n{text}"
    if fmt == "csv":
        text = _csv_text(["true"] + labels, rows)
        return text if run is None else f"# run: {_run_json(run)}\n{text}"
    raise ValueError(f"format {fmt!r} is not one of {', '.join(REPORT_FORMATS)}")


def envelope_csv(sweep: ThresholdSweep, class_map: Mapping[int, str]) -> str:
    """Interpolated precision at the 101 recall points, first threshold of the sweep."""
    rows = []
    for class_id, envelope in sweep.envelopes.items():
        if envelope is None:
            continue
        name = class_map.get(class_id, str(class_id))
        for recall, precision in zip(RECALL_POINTS, np.asarray(envelope)):
            rows.append([name, f"{recall:.2f}", f"{precision:.4f}"])
    return _csv_text(("class", "recall", "precision"), rows)
