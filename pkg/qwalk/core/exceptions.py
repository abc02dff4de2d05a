"""
Exception hierarchy for QWalk Lattice

Every error carries the CLI exit code it maps to: 2 for validation
problems, 3 for failures while running.
"""

from typing import List, Optional

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


class QWalkError(Exception):
    """Base class for all simulator errors"""

    exit_code = EXIT_RUNTIME


class InvalidParameterError(QWalkError, ValueError):
    """A parameter is outside its documented domain"""

    exit_code = EXIT_VALIDATION


class ConfigParseError(QWalkError, ValueError):
    """An experiment document could not be parsed or validated"""

    exit_code = EXIT_VALIDATION

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        line: Optional[int] = None,
        fields: Optional[List[str]] = None,
    ):
        self.field = field
        self.line = line
        self.fields = fields or ([field] if field else [])
        location = ""
        if field:
            location += f" [field '{field}'"
            location += f", line {line}]" if line is not None else "]"
        super().__init__(f"{message}{location}")


class CapacityError(QWalkError):
    """The walker would leave the allocated lattice"""


class UndefinedQuantityError(QWalkError, ArithmeticError):
    """A requested quantity has no defined value for the given inputs"""


class FitError(QWalkError):
    """A least-squares fit cannot be performed on the given inputs"""


class InvariantViolationError(QWalkError):
    """A physical invariant drifted beyond its tolerance"""


class EmitError(QWalkError):
    """Writing an output artifact failed"""

    def __init__(self, message: str, path: str):
        self.path = path
        super().__init__(f"{message}: {path}")


class ExperimentError(QWalkError):
    """A run failed; wraps the underlying error with the run name"""

    def __init__(self, name: str, cause: Exception):
        self.name = name
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", EXIT_RUNTIME)
        super().__init__(f"Experiment '{name}' failed: {cause}")
