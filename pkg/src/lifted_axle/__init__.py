__version__ = "0.1.0"

from .geometry import BoundingBox, PolygonMask, box_iou, mask_iou, letterbox
from .core import Detection, GroundTruthInstance
from .config import Settings
from .cascade import CascadeConfig, run_cascade
from .metrics import match_predictions, evaluate, compute_prf, average_precision
from .utils import LiftedAxleError, setup_logging

__all__ = [
    'BoundingBox',
    'PolygonMask',
    'box_iou',
    'mask_iou',
    'letterbox',
    'Detection',
    'GroundTruthInstance',
    'Settings',
    'CascadeConfig',
    'run_cascade',
    'match_predictions',
    'evaluate',
    'compute_prf',
    'average_precision',
    'LiftedAxleError',
    'setup_logging',
]


def main() -> None:
    import sys
    from .cli import main as cli_main
    sys.exit(cli_main())
