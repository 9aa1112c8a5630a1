"""Exception hierarchy; every error carries the CLI exit code it maps to."""

from typing import Any

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


class FireFrontError(Exception):
    """Base class for all firefront errors."""

    exit_code = EXIT_NUMERIC


# --- Validation (exit 2) ---


class ConfigError(FireFrontError):
    exit_code = EXIT_VALIDATION


class BoundsError(FireFrontError):
    exit_code = EXIT_VALIDATION


class KindMismatchError(FireFrontError):
    exit_code = EXIT_VALIDATION


class ScenarioError(FireFrontError):
    exit_code = EXIT_VALIDATION


# --- I/O (exit 3) ---


class LoadError(FireFrontError):
    exit_code = EXIT_IO

    def __init__(self, path: Any, reason: str = "unreadable or corrupt"):
        self.path = str(path)
        super().__init__(f"Cannot load {self.path}: {reason}")


class DimensionMismatchError(FireFrontError):
    exit_code = EXIT_IO


class EmptyInputError(FireFrontError):
    exit_code = EXIT_IO


class ExportError(FireFrontError):
    exit_code = EXIT_IO

    def __init__(self, path: Any, reason: str):
        self.path = str(path)
        super().__init__(f"Cannot write {self.path}: {reason}")


# --- Numeric / convergence (exit 4) ---


class DegenerateGeometryError(FireFrontError):
    pass


class DomainError(FireFrontError):
    pass


class DegenerateSampleError(FireFrontError):
    pass


class NormalizationError(FireFrontError):
    pass


class InsufficientBoundaryError(FireFrontError):
    pass


class InsufficientSequenceError(FireFrontError):
    pass


class ConvergenceError(FireFrontError):
    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class PipelineStageError(FireFrontError):
    """Wraps an error raised inside a pipeline stage with its location."""

    def __init__(self, stage: str, frame_index: int | None, cause: Exception):
        self.stage = stage
        self.frame_index = frame_index
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", EXIT_NUMERIC)
        where = f"stage '{stage}'"
        if frame_index is not None:
            where += f", frame {frame_index}"
        super().__init__(f"Pipeline aborted at {where}: {cause}")
