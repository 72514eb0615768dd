"""Exception hierarchy shared across the package.

The CLI maps these onto distinct exit codes: validation failures (bad
inputs, shapes, malformed files) exit 2, environment failures (missing
external tools) exit 3, everything else exits 1.
"""


class SoftvidError(Exception):
    """Base class for all package errors."""


class ValidationError(SoftvidError):
    """Caller passed inputs that violate an operation's preconditions."""


class FormatError(ValidationError):
    """A file on disk does not match its expected format."""


class EnvironmentFailure(SoftvidError):
    """A required external tool or resource is unavailable."""


class MissingEncoderError(EnvironmentFailure):
    """The external video encoder executable was not found."""


class CheckpointError(SoftvidError):
    """A checkpoint file is corrupt or has an incompatible version."""


class TrainingDiverged(SoftvidError):
    """Training produced a non-finite loss."""
