from typing import Any, Dict, Optional
from enum import Enum


class ArgType(Enum):
    NUMBER = 'number'
    INTEGER = 'integer'
    STRING = 'string'
    PATH = 'path'
    FLAG = 'flag'
    CHOICE = 'choice'
    def __str__(self):
        return self.value


# Command decorator with argument type validation using enums
def command_def(description: str, arguments: Dict[str, Dict[str, Any]],
                group: Optional[str] = None, name: Optional[str] = None):
    """
    Decorator for defining a CLI command on an App.

    Args:
        description: Help text of the command
        arguments: Argument specs keyed by flag (``--iou``) or positional name (``predictions``).
            Each spec holds ``type`` (an ArgType) and optionally ``help``, ``default``,
            ``choices``, ``required``, ``optional`` (positional may be omitted) and ``repeat``.
        group: Parent command for nested subcommands (``dataset split``)
        name: Command name; defaults to the method name without its ``cmd_`` prefix

    Raises:
        TypeError: If an argument type is not an ArgType, or a CHOICE lacks choices
    """
    for arg_name, spec in arguments.items():
        if not isinstance(spec.get("type"), ArgType):
            raise TypeError(f"Argument type for {arg_name} must be an ArgType enum value, "
                            f"got {type(spec.get('type')).__name__}")
        if spec["type"] == ArgType.CHOICE and not spec.get("choices"):
            raise TypeError(f"Argument {arg_name} is a CHOICE without choices")

    def decorator(func):
        func._cli_command = {
            "description": description,
            "arguments": arguments,
            "group": group,
            "name": name or func.__name__.removeprefix("cmd_").replace("_", "-"),
        }
        return func
    return decorator
