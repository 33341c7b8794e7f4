from .decorators import ArgType, command_def
from .manifest import RunManifest
from .output import OutputPlan
from .app import App, main, parse_assignments

__all__ = [
    'ArgType',
    'command_def',
    'RunManifest',
    'OutputPlan',
    'App',
    'main',
    'parse_assignments',
]
