"""Exception hierarchy shared across the package."""


class A2AError(Exception):
    """Base class for all package errors."""


class ConfigError(A2AError):
    """Invalid configuration: bad shapes, unknown keys, out-of-range weights."""


class InputError(A2AError):
    """Invalid runtime input (out-of-range scalar, unreachable target, ...)."""


class TrainingError(A2AError):
    """Training-time failure, e.g. a non-finite loss or gradient."""


class RolloutError(A2AError):
    """Failure while stepping an environment rollout."""


class StatsError(A2AError):
    """Degenerate normalization statistics."""


class ContainerError(A2AError):
    """Base class for dataset container load failures."""


class BadMagicError(ContainerError):
    """File does not start with the expected magic bytes."""


class VersionError(ContainerError):
    """File declares an unsupported format version."""


class TruncatedError(ContainerError):
    """File ends before the declared payload is complete."""


class CheckpointError(A2AError):
    """Checkpoint file malformed or incompatible."""
