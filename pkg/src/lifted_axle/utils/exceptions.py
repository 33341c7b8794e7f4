class LiftedAxleError(Exception):
    """Root error. ``code`` doubles as the process exit status of the CLI."""
    def __init__(self, message: str, code: int = 70):
        self.code = code
        self.message = message
        super().__init__(f"[{code}] {message}")

class InputNotFoundError(LiftedAxleError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"input not found: {path}", 66)

class OutputWriteError(LiftedAxleError):
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"cannot write {path}: {reason}", 73)

class InvalidBoxError(LiftedAxleError, ValueError):
    def __init__(self, message: str):
        super().__init__(f"invalid box: {message}", 65)

class InvalidPolygonError(LiftedAxleError, ValueError):
    """Raised when a polygon has fewer than 3 vertices or bad coordinates."""
    def __init__(self, message: str):
        super().__init__(f"invalid polygon: {message}", 65)

class LabelParseError(LiftedAxleError, ValueError):
    """Raised for a malformed label line. Always names the line and the offending token."""
    def __init__(self, line: int, token: str, reason: str):
        self.line = line
        self.token = token
        self.reason = reason
        super().__init__(f"line {line}: {reason} (token {token!r})", 65)

class LabelSerializationError(LiftedAxleError, ValueError):
    def __init__(self, message: str):
        super().__init__(f"cannot serialize labels: {message}", 65)

class DatasetError(LiftedAxleError, ValueError):
    def __init__(self, message: str):
        super().__init__(message, 65)

class TrainingConfigError(LiftedAxleError, ValueError):
    def __init__(self, message: str):
        super().__init__(message, 78)

class ConfigValueError(LiftedAxleError, ValueError):
    """Raised when a settings value is missing, unknown or out of range."""
    def __init__(self, key: str, reason: str):
        self.key = key
        self.reason = reason
        super().__init__(f"config {key}: {reason}", 78)

class MatchingError(LiftedAxleError, ValueError):
    def __init__(self, message: str):
        super().__init__(message, 65)

class UndefinedAveragePrecisionError(LiftedAxleError, ValueError):
    def __init__(self, message: str = "no class has a defined average precision"):
        super().__init__(message, 65)

class PredictionSchemaError(LiftedAxleError, ValueError):
    """Raised for predictions JSON that violates the schema. ``path`` is a JSON path like ``$.images[0].id``."""
    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}", 65)

class LayoutError(LiftedAxleError, ValueError):
    def __init__(self, message: str):
        super().__init__(f"infeasible synthetic layout: {message}", 65)

class BackendUnavailableError(LiftedAxleError):
    def __init__(self, backend: str, reason: str):
        super().__init__(f"backend {backend} unavailable: {reason}", 69)
