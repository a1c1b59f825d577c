"""Exception hierarchy shared by every subsystem.

Each class carries the CLI exit code it maps to:
1 usage, 2 data error, 3 numerical failure.
"""


class ToolkitError(Exception):
    """Base exception for all toolkit errors"""
    exit_code: int = 2


class ArgumentError(ToolkitError):
    """Invalid arguments passed to an operation"""
    exit_code = 1


class ConfigError(ToolkitError):
    """Run configuration could not be parsed or validated"""
    exit_code = 1

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StructuralError(ToolkitError):
    """Unknown node, self-loop or directed cycle"""
    pass


class SchemaError(ToolkitError):
    """Data does not match the declared schema"""

    def __init__(self, message: str, columns: list[str] | None = None):
        self.columns = list(columns or [])
        super().__init__(message)


class ImputationError(ToolkitError):
    """Not enough donors to impute a column"""

    def __init__(self, message: str, column: str | None = None):
        self.column = column
        super().__init__(message)


class TransformError(ToolkitError):
    """Transform applied outside its domain"""

    def __init__(self, message: str, index: int | None = None):
        self.index = index
        super().__init__(message)


class DegenerateInputError(ToolkitError):
    """Sample is too small or has zero variance"""
    exit_code = 3


class FitError(ToolkitError):
    """Local distribution cannot be estimated"""
    exit_code = 3


class CollinearityError(FitError):
    """Design matrix of a local regression is singular"""
    pass


class EvaluationError(ToolkitError):
    """Model evaluated on data it cannot represent"""
    pass


class ConstraintError(ToolkitError):
    """Blacklist/whitelist is inadmissible"""
    pass


class SearchError(ToolkitError):
    """Structure search cannot proceed"""
    exit_code = 3


class AveragingError(ToolkitError):
    """Replicate structures cannot be averaged"""
    pass
