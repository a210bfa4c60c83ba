"""Exception hierarchy. The CLI maps these onto exit codes."""


class DomwaveError(Exception):
    """Base class for all errors raised by this package."""


class DataError(DomwaveError, ValueError):
    """Bad input data: unreadable files, malformed images, wrong shapes."""


class ImageFormatError(DataError):
    """A PGM file could not be parsed."""

    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class GeometryError(DataError):
    """Image dimensions are incompatible with the configured geometry."""


class ConfigError(DomwaveError, ValueError):
    """Invalid or unparseable pipeline configuration."""


class FingerprintMismatch(DataError):
    """Feature vectors or models built under different configurations were mixed."""


class InvariantViolation(DomwaveError, RuntimeError):
    """An internal consistency check failed."""
