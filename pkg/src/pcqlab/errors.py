"""Exception hierarchy shared across the toolkit.

The CLI maps these onto its exit-code contract: validation failures exit
with 1, environment problems (missing binaries, unreachable paths) with 2,
anything else with 3.
"""


class PcqlabError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(PcqlabError):
    """Bad input data or arguments; maps to exit code 1."""


class PlyParseError(ValidationError):
    """Malformed PLY header or body; carries the offending line."""

    def __init__(self, message: str, line_number: int | None = None, line: str | None = None):
        if line_number is not None:
            message = f"{message} (line {line_number}: {line!r})"
        super().__init__(message)
        self.line_number = line_number
        self.line = line


class UnsupportedFormatError(ValidationError):
    """File is structurally valid but uses a feature we do not support."""


class SchemaError(ValidationError):
    """Input violates a declared record/file schema."""


class MissingAttributeError(ValidationError):
    """An operation needs an attribute (e.g. colors) the input lacks."""


class DomainError(ValidationError):
    """Argument outside its documented domain."""


class ConfigurationError(ValidationError):
    """Inconsistent or incomplete configuration."""


class IntegrityError(ValidationError):
    """Internally inconsistent data that should have been impossible."""


class StateError(ValidationError):
    """Operation not legal in the current session/store state."""


class EnvironmentFailure(PcqlabError):
    """Missing external tool or unusable environment; maps to exit code 2."""
