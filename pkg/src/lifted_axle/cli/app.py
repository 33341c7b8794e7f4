from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple

from ..annotations import (
    DatasetManifest,
    ManifestEntry,
    MODEL_KINDS,
    axle_counts_from_instances,
    build_training_config,
    split_dataset,
    summarize_dataset,
    write_labels,
)
from ..backend import PredictionSet, PredictionsCodec, SyntheticSceneSpec, generate_synthetic_dataset
from ..cascade import CASCADE_SETTINGS, DIRECTIONS, CascadeConfig, run_cascade
from ..core import (
    CASCADE_CLASSES,
    CLASS_MAP_PRESETS,
    LIFTED_AXLE_CLASSES,
    TRUCK_AXLE_CLASSES,
    Detection,
    resolve_class_map,
)
from ..metrics import IOU_KINDS, REPORT_FORMATS, envelope_csv, evaluate, format_confusion, format_report
from ..utils.exceptions import ConfigValueError, DatasetError, InputNotFoundError, LiftedAxleError
from ..utils.logs import setup_logging
from .decorators import ArgType, command_def
from .manifest import RunManifest, maybe
from .output import OutputPlan
from .overlay import find_image, overlay_png

cli_log = logging.getLogger('cli')

LABEL_KINDS = ("detection", "segmentation")
TRUCK_CLASS = 0
AXLE_CLASS = 1
LIFTED_CLASS = 2


def _read_text(path: Path) -> str:
    if not path.is_file():
        raise InputNotFoundError(str(path))
    return path.read_text(encoding="utf-8")


def parse_assignments(items: Optional[Sequence[str]]) -> Dict[str, Any]:
    """``key=value`` pairs; values are read as JSON when possible, else kept as strings."""
    values: Dict[str, Any] = {}
    for item in items or ():
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigValueError(item, "expected key=value")
        try:
            values[key] = json.loads(raw)
        except json.JSONDecodeError:
            values[key] = raw
    return values


class App:
    """lifted-axle 命令行入口"""

    def __init__(self, prog: str = "lifted-axle", stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None):
        self.prog = prog
        self.stdout = stdout
        self.stderr = stderr
        self.commands: Dict[Tuple[Optional[str], str], Dict[str, Any]] = {}
        self._started = 0.0
        self._register_decorated_commands()
        self.parser = self._build_parser()

    def _register_decorated_commands(self):
        for attr_name in dir(self.__class__):
            if attr_name.startswith('__'):
                continue
            attr = getattr(self.__class__, attr_name)
            info = getattr(attr, '_cli_command', None)
            if info is None:
                continue
            self.commands[(info["group"], info["name"])] = {**info, "handler": attr}

    @staticmethod
    def _add_argument(parser: argparse.ArgumentParser, name: str, spec: Dict[str, Any]):
        arg_type = spec["type"]
        kwargs: Dict[str, Any] = {"help": spec.get("help")}
        positional = not name.startswith("-")
        if arg_type == ArgType.FLAG:
            parser.add_argument(name, action="store_true", help=spec.get("help"))
            return
        if arg_type == ArgType.NUMBER:
            kwargs["type"] = float
        elif arg_type == ArgType.INTEGER:
            kwargs["type"] = int
        elif arg_type == ArgType.PATH:
            kwargs["type"] = Path
        elif arg_type == ArgType.CHOICE:
            kwargs["choices"] = list(spec["choices"])
        if spec.get("repeat"):
            kwargs["action"] = "append"
        if positional:
            if spec.get("optional"):
                kwargs["nargs"] = "?"
        else:
            kwargs["required"] = spec.get("required", False)
        if "default" in spec:
            kwargs["default"] = spec["default"]
        parser.add_argument(name, **kwargs)

    def _build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(prog=self.prog, description="Lifted truck axle detection toolkit")
        parser.add_argument("--log-level", default=None, help="overrides LOG_LEVEL")
        top = parser.add_subparsers(dest="command", required=True)
        groups: Dict[str, argparse._SubParsersAction] = {}
        for (group, name), info in sorted(self.commands.items(), key=lambda kv: (kv[0][0] or "", kv[0][1])):
            if group is None:
                sub = top.add_parser(name, help=info["description"], description=info["description"])
            else:
                if group not in groups:
                    group_parser = top.add_parser(group, help=f"{group} tools")
                    groups[group] = group_parser.add_subparsers(dest="subcommand", required=True)
                sub = groups[group].add_parser(name, help=info["description"], description=info["description"])
            for arg_name, spec in info["arguments"].items():
                self._add_argument(sub, arg_name, spec)
            sub.set_defaults(_handler=info["handler"], _command=f"{group} {name}" if group else name)
        return parser

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        stdout = self.stdout or sys.stdout
        stderr = self.stderr or sys.stderr
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)
        setup_logging(args.log_level)
        self._started = started = time.perf_counter()
        try:
            plan, text = args._handler(self, args)
            plan.commit()
        except LiftedAxleError as e:
            cli_log.debug("%s failed", args._command, exc_info=True)
            print(f"{self.prog}: error: {e.message}", file=stderr)
            return e.code
        except ValueError as e:
            cli_log.debug("%s failed", args._command, exc_info=True)
            print(f"{self.prog}: error: {e}", file=stderr)
            return 65
        if text:
            stdout.write(text)
        cli_log.debug("%s finished in %.3f s", args._command, time.perf_counter() - started)
        return 0

    def _manifest(self, args, config: Dict[str, Any], inputs: Dict[str, Path]) -> Optional[RunManifest]:
        if getattr(args, "no_manifest", False):
            return None
        manifest = RunManifest(args._command, config)
        for name, path in inputs.items():
            manifest.add_input(name, path)
        manifest.duration_s = time.perf_counter() - self._started
        return manifest

    # ---- evaluate ---------------------------------------------------------

    @command_def("Score predictions against a labelled dataset", {
        "gt": {"type": ArgType.PATH, "help": "dataset manifest JSON"},
        "predictions": {"type": ArgType.PATH, "help": "predictions JSON"},
        "--iou": {"type": ArgType.NUMBER, "default": 0.5, "help": "IoU threshold for P/R/F1 and the confusion matrix"},
        "--conf": {"type": ArgType.NUMBER, "default": 0.25, "help": "confidence threshold for P/R/F1 and the confusion matrix"},
        "--ap-conf": {"type": ArgType.NUMBER, "default": 0.001, "help": "confidence floor for AP ranking"},
        "--iou-kind": {"type": ArgType.CHOICE, "choices": IOU_KINDS, "default": "box"},
        "--labels": {"type": ArgType.CHOICE, "choices": LABEL_KINDS, "help": "label syntax (default follows --iou-kind)"},
        "--classes": {"type": ArgType.CHOICE, "choices": sorted(CLASS_MAP_PRESETS)},
        "--split": {"type": ArgType.CHOICE, "choices": ("train", "val"), "help": "evaluate one split only"},
        "--format": {"type": ArgType.CHOICE, "choices": REPORT_FORMATS, "default": "json"},
        "--output": {"type": ArgType.PATH, "help": "report path; the confusion matrix goes next to it"},
        "--pr-curve": {"type": ArgType.PATH, "help": "write the IoU 0.5 precision envelope as CSV"},
        "--no-manifest": {"type": ArgType.FLAG, "help": "omit the run manifest for byte-stable output"},
    })
    def cmd_evaluate(self, args) -> Tuple[OutputPlan, str]:
        labels = args.labels or ("segmentation" if args.iou_kind == "mask" else "detection")
        default_map = TRUCK_AXLE_CLASSES if labels == "detection" else LIFTED_AXLE_CLASSES
        manifest = DatasetManifest.load(args.gt, default_map)
        if args.classes:
            manifest = replace(manifest, class_map=resolve_class_map(args.classes))
        class_map = manifest.class_map

        ground_truth = manifest.load_ground_truth(labels, args.split)
        predictions = PredictionsCodec(class_map).parse(_read_text(args.predictions))
        extra = sorted(set(predictions.detections) - set(ground_truth))
        if extra:
            cli_log.warning("ignoring predictions for %d image(s) outside the evaluated set", len(extra))
        preds = {image_id: predictions.detections.get(image_id, []) for image_id in ground_truth}

        result = evaluate(preds, ground_truth, class_map, iou_threshold=args.iou,
                          confidence_threshold=args.conf, ap_confidence_threshold=args.ap_conf,
                          iou_kind=args.iou_kind, image_sizes=manifest.image_sizes())
        run = maybe(self._manifest(args, {
            "iou": args.iou, "conf": args.conf, "ap_conf": args.ap_conf, "iou_kind": args.iou_kind,
            "labels": labels, "split": args.split, "class_map": {str(k): v for k, v in class_map.items()},
        }, {"gt": args.gt, "predictions": args.predictions}))

        report_text = format_report(result.report, args.format, run)
        confusion_text = format_confusion(result.confusion, args.format, run)
        plan = OutputPlan()
        if args.pr_curve:
            plan.add(args.pr_curve, envelope_csv(result.sweep, class_map))
        if args.output is None:
            return plan, report_text + "\n" + confusion_text
        plan.add(args.output, report_text)
        plan.add(args.output.with_name(f"{args.output.stem}.confusion{args.output.suffix}"), confusion_text)
        return plan, ""

    # ---- cascade ----------------------------------------------------------

    @command_def("Group axles under trucks and flag lifted axles, per image", {
        "predictions": {"type": ArgType.PATH, "optional": True,
                        "help": "predictions JSON with truck (0), axle (1) and lifted-axle detections"},
        "--config": {"type": ArgType.PATH, "help": "cascade config JSON"},
        "--set": {"type": ArgType.STRING, "repeat": True, "help": "override a config key, key=value"},
        "--direction": {"type": ArgType.CHOICE, "choices": DIRECTIONS},
        "--lifted-class": {"type": ArgType.INTEGER, "default": LIFTED_CLASS, "help": "class id of lifted-axle masks"},
        "--output": {"type": ArgType.PATH, "help": "output directory"},
        "--overlay": {"type": ArgType.FLAG, "help": "write annotated copies of the images"},
        "--images": {"type": ArgType.PATH, "help": "directory holding <image_id>.<jpg|png|...>"},
        "--no-manifest": {"type": ArgType.FLAG},
        "--print-schema": {"type": ArgType.FLAG, "help": "print the config schema and exit"},
    })
    def cmd_cascade(self, args) -> Tuple[OutputPlan, str]:
        if args.print_schema:
            return OutputPlan(), CASCADE_SETTINGS.to_json_str() + "\n"
        if args.predictions is None:
            raise ConfigValueError("predictions", "a predictions file is required")
        if args.output is None:
            raise ConfigValueError("output", "--output <dir> is required")
        if args.overlay and args.images is None:
            raise ConfigValueError("images", "--overlay needs --images <dir>")
        if args.lifted_class in (TRUCK_CLASS, AXLE_CLASS) or args.lifted_class < 0:
            raise ConfigValueError("lifted-class", f"{args.lifted_class} collides with the truck/axle classes")

        config = CascadeConfig()
        if args.config:
            config = CascadeConfig.from_json(_read_text(args.config))
        config = CascadeConfig.from_obj(parse_assignments(args.set), base=config)
        if args.direction:
            config = CascadeConfig.from_obj({"direction": args.direction}, base=config)

        class_map = {TRUCK_CLASS: CASCADE_CLASSES[0], AXLE_CLASS: CASCADE_CLASSES[1],
                     args.lifted_class: CASCADE_CLASSES[2]}
        predictions = PredictionsCodec(class_map).parse(_read_text(args.predictions))
        run = maybe(self._manifest(args, {**config.to_dict(), "lifted_class": args.lifted_class},
                                   {"predictions": args.predictions}))

        plan = OutputPlan()
        summary = []
        for image_id in predictions.image_ids():
            dets = predictions.detections.get(image_id, [])
            trucks = [d for d in dets if d.class_id == TRUCK_CLASS]
            axles = [d for d in dets if d.class_id == AXLE_CLASS]
            masks = [d for d in dets if d.class_id == args.lifted_class]
            result = run_cascade(trucks, axles, masks, config)
            body = {"image_id": image_id, **result.to_dict()}
            if run is not None:
                body = {"run": run, **body}
            plan.add(args.output / f"{image_id}.json", json.dumps(body, ensure_ascii=False, indent=2) + "\n")
            summary.append({
                "image_id": image_id,
                "axle_counts": [r.axle_count for r in result.records],
                "lifted_ordinals": [r.lifted_ordinals for r in result.records],
                "orphans": len(result.orphans),
                "unassociated_lifted": result.unassociated,
            })
            if args.overlay:
                image_path = find_image(args.images, image_id)
                if image_path is None:
                    raise InputNotFoundError(str(args.images / image_id))
                plan.add(args.output / f"{image_id}.overlay.png", overlay_png(image_path, result, masks))

        index = {"images": summary}
        if run is not None:
            index = {"run": run, **index}
        plan.add(args.output / "summary.json", json.dumps(index, ensure_ascii=False, indent=2) + "\n")
        return plan, ""

    # ---- dataset ----------------------------------------------------------

    @command_def("Tag manifest entries train/val", {
        "manifest": {"type": ArgType.PATH},
        "--train-fraction": {"type": ArgType.NUMBER, "default": 0.8},
        "--seed": {"type": ArgType.INTEGER, "default": 0},
        "--reassign": {"type": ArgType.FLAG, "help": "overwrite existing split tags"},
        "--output": {"type": ArgType.PATH, "help": "defaults to rewriting the manifest in place"},
    }, group="dataset")
    def cmd_split(self, args) -> Tuple[OutputPlan, str]:
        manifest = DatasetManifest.load(args.manifest)
        split = split_dataset(manifest, args.train_fraction, args.seed, args.reassign)
        plan = OutputPlan()
        target = args.output or args.manifest
        plan.add(target, split.to_json(Path(target).parent))
        return plan, ""

    @command_def("Count trucks per source and axle count", {
        "manifest": {"type": ArgType.PATH},
        "--format": {"type": ArgType.CHOICE, "choices": REPORT_FORMATS, "default": "markdown"},
        "--output": {"type": ArgType.PATH},
        "--no-manifest": {"type": ArgType.FLAG},
    }, group="dataset")
    def cmd_summarize(self, args) -> Tuple[OutputPlan, str]:
        manifest = DatasetManifest.load(args.manifest, TRUCK_AXLE_CLASSES)
        ground_truth = manifest.load_ground_truth("detection")
        counts = {image_id: axle_counts_from_instances(instances) for image_id, instances in ground_truth.items()}
        table = summarize_dataset(manifest, counts)
        run = maybe(self._manifest(args, {}, {"manifest": args.manifest}))

        if args.format == "markdown":
            text = table.to_markdown()
            if run is not None:
                text = f"<!-- run: {json.dumps(run, sort_keys=True)} -->\n{text}"
        elif args.format == "csv":
            text = table.to_csv()
            if run is not None:
                text = f"# run: {json.dumps(run, sort_keys=True)}\n{text}"
        else:
            body = {"summary": table.to_dict()}
            if run is not None:
                body = {"run": run, **body}
            text = json.dumps(body, ensure_ascii=False, indent=2) + "\n"

        plan = OutputPlan()
        if args.output is None:
            return plan, text
        plan.add(args.output, text)
        return plan, ""

    @command_def("Emit the training hyperparameters for a model kind", {
        "--kind": {"type": ArgType.CHOICE, "choices": MODEL_KINDS, "default": "detection"},
        "--set": {"type": ArgType.STRING, "repeat": True, "help": "override a key, key=value"},
        "--output": {"type": ArgType.PATH},
    }, group="dataset", name="gen-config")
    def cmd_gen_config(self, args) -> Tuple[OutputPlan, str]:
        text = build_training_config(args.kind, parse_assignments(args.set)).to_text()
        plan = OutputPlan()
        if args.output is None:
            return plan, text
        plan.add(args.output, text)
        return plan, ""

    @command_def("Materialize synthetic scenes: labels, manifests and predictions", {
        "spec": {"type": ArgType.PATH, "help": "scene description JSON: one scene, an array, or {\"scenes\": [...]}"},
        "--output": {"type": ArgType.PATH, "required": True, "help": "output directory"},
        "--seed": {"type": ArgType.INTEGER, "help": "base seed; scene i uses seed + i"},
    }, group="dataset")
    def cmd_synth(self, args) -> Tuple[OutputPlan, str]:
        try:
            data = json.loads(_read_text(args.spec))
        except json.JSONDecodeError as e:
            raise DatasetError(f"{args.spec}: invalid JSON: {e}") from e
        if isinstance(data, dict) and "scenes" in data:
            data = data["scenes"]
        raw_specs = data if isinstance(data, list) else [data]
        specs = [SyntheticSceneSpec.from_obj(raw) for raw in raw_specs]
        if args.seed is not None:
            specs = [replace(spec, seed=args.seed + i) for i, spec in enumerate(specs)]
        scenes = generate_synthetic_dataset(specs)

        out: Path = args.output
        plan = OutputPlan()
        det_entries: List[ManifestEntry] = []
        seg_entries: List[ManifestEntry] = []
        det_preds, seg_preds, cascade_preds = PredictionSet(), PredictionSet(), PredictionSet()
        truth = []
        for scene in scenes:
            det_label = f"labels/detection/{scene.image_id}.txt"
            seg_label = f"labels/segmentation/{scene.image_id}.txt"
            plan.add(out / det_label, write_labels(scene.detection_gt, scene.width, scene.height))
            plan.add(out / seg_label, write_labels(scene.segmentation_gt, scene.width, scene.height))
            det_entries.append(ManifestEntry(scene.image_id, scene.width, scene.height, det_label, source="synthetic"))
            seg_entries.append(ManifestEntry(scene.image_id, scene.width, scene.height, seg_label, source="synthetic"))
            lifted_as_cascade = [Detection(LIFTED_CLASS, d.box, d.confidence, d.image_id, d.mask)
                                 for d in scene.lifted_predictions]
            det_preds.add_image(scene.image_id, scene.width, scene.height, scene.truck_axle_predictions)
            seg_preds.add_image(scene.image_id, scene.width, scene.height, scene.lifted_predictions)
            cascade_preds.add_image(scene.image_id, scene.width, scene.height,
                                    scene.truck_axle_predictions + lifted_as_cascade)
            truth.append({"image_id": scene.image_id, "axle_counts": scene.axle_counts,
                          "lifted_ordinals": [list(o) for o in scene.lifted_ordinals]})

        codec = PredictionsCodec()
        plan.add(out / "detection_manifest.json",
                 DatasetManifest(tuple(det_entries), dict(TRUCK_AXLE_CLASSES), explicit_class_map=True).to_json())
        plan.add(out / "segmentation_manifest.json",
                 DatasetManifest(tuple(seg_entries), dict(LIFTED_AXLE_CLASSES), explicit_class_map=True).to_json())
        plan.add(out / "detection_predictions.json", codec.serialize(det_preds))
        plan.add(out / "segmentation_predictions.json", codec.serialize(seg_preds))
        plan.add(out / "cascade_predictions.json", codec.serialize(cascade_preds))
        plan.add(out / "truth.json", json.dumps({"images": truth}, ensure_ascii=False, indent=2) + "\n")
        cli_log.info("generated %d synthetic scenes", len(scenes))
        return plan, ""


def main(argv: Optional[Sequence[str]] = None) -> int:
    return App().run(argv)
