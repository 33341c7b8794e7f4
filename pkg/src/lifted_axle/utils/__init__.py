from .logs import setup_logging, level_mapping
from .exceptions import (
    LiftedAxleError,
    InputNotFoundError,
    OutputWriteError,
    InvalidBoxError,
    InvalidPolygonError,
    LabelParseError,
    LabelSerializationError,
    DatasetError,
    TrainingConfigError,
    ConfigValueError,
    MatchingError,
    UndefinedAveragePrecisionError,
    PredictionSchemaError,
    LayoutError,
    BackendUnavailableError,
)

__all__ = [
    "setup_logging",
    "level_mapping",
    "LiftedAxleError",
    "InputNotFoundError",
    "OutputWriteError",
    "InvalidBoxError",
    "InvalidPolygonError",
    "LabelParseError",
    "LabelSerializationError",
    "DatasetError",
    "TrainingConfigError",
    "ConfigValueError",
    "MatchingError",
    "UndefinedAveragePrecisionError",
    "PredictionSchemaError",
    "LayoutError",
    "BackendUnavailableError",
]
