"""
Training hyperparameters for the detection and segmentation models, emitted
as ``key: value`` text in the order the trainer expects.
"""
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional

from ..config import ConfigSection, IntegerItem, NumberItem, Settings, TextItem
from ..utils.exceptions import ConfigValueError, TrainingConfigError

MODEL_KINDS = ("detection", "segmentation")
TRAINING_KEYS = ("epochs", "batch", "optimizer", "lr0", "scale", "fliplr", "shear")


def _training_settings() -> Settings:
    settings = Settings("training")
    settings.add_section(
        ConfigSection("schedule")
        .add_item(IntegerItem("epochs", "Number of epochs", min=0, min_inclusive=False, default=400))
        .add_item(IntegerItem("batch", "Batch size", min=0, min_inclusive=False))
        .add_item(TextItem("optimizer", "Optimizer", default="AdamW"))
        .add_item(NumberItem("lr0", "Learning rate", min=0, min_inclusive=False, default=0.01))
    )
    settings.add_section(
        ConfigSection("augmentation")
        .add_item(NumberItem("scale", "Scaling", min=0, min_inclusive=False, default=0.5))
        .add_item(NumberItem("fliplr", "Flip left-right", min=0, max=1, min_inclusive=False, default=0.5))
        .add_item(NumberItem("shear", "Shear", min=0, min_inclusive=False))
    )
    return settings


TRAINING_SETTINGS = _training_settings()

KIND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "detection": {"batch": 3, "shear": 0.5},
    "segmentation": {"batch": 32},
}


@dataclass(frozen=True)
class TrainingConfig:
    model_kind: str
    epochs: int
    batch_size: int
    optimizer_name: str
    learning_rate: float
    scale: float
    flip_lr: float
    shear: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        values = {
            "epochs": self.epochs,
            "batch": self.batch_size,
            "optimizer": self.optimizer_name,
            "lr0": self.learning_rate,
            "scale": self.scale,
            "fliplr": self.flip_lr,
        }
        if self.shear is not None:
            values["shear"] = self.shear
        return values

    def to_text(self) -> str:
        return "".join(f"{key}: {_format_value(value)}\n" for key, value in self.to_dict().items())


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def build_training_config(model_kind: str, overrides: Optional[Mapping[str, Any]] = None) -> TrainingConfig:
    """Defaults for ``model_kind`` with ``overrides`` applied and validated."""
    if model_kind not in MODEL_KINDS:
        raise TrainingConfigError(f"model kind {model_kind!r} is not one of {', '.join(MODEL_KINDS)}")
    base = {**TRAINING_SETTINGS.defaults(), **KIND_DEFAULTS[model_kind]}
    try:
        values = TRAINING_SETTINGS.from_obj(dict(overrides or {}), base=base)
    except ConfigValueError as e:
        raise TrainingConfigError(f"invalid training override {e.key}: {e.reason}") from e
    return TrainingConfig(
        model_kind=model_kind,
        epochs=values["epochs"],
        batch_size=values["batch"],
        optimizer_name=values["optimizer"],
        learning_rate=values["lr0"],
        scale=values["scale"],
        flip_lr=values["fliplr"],
        shear=values.get("shear"),
    )


def emit_training_config(model_kind: str, overrides: Optional[Mapping[str, Any]] = None) -> str:
    return build_training_config(model_kind, overrides).to_text()
