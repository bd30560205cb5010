"""Exception hierarchy. Each family maps to one CLI exit code."""


class PixInterpError(Exception):
    exit_code = 1


class DecodeError(PixInterpError, ValueError):
    """Unreadable or malformed input (PGM payload, annotation file, CSV)."""

    exit_code = 2


class DetectionError(PixInterpError, ValueError):
    """No usable region could be isolated."""

    exit_code = 3


class DegenerateError(PixInterpError, ValueError):
    """Geometry collapsed (zero-area polygon, zero-extent region, ...)."""

    exit_code = 3


class ConfigError(PixInterpError, ValueError):
    exit_code = 4
