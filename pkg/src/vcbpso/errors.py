"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid configuration value or combination."""


class ParseError(ConfigError):
    """Malformed config or instance file; message names the offending key/line."""


class OracleError(RuntimeError):
    """A test oracle failed to produce a reference value."""


class ResourceError(RuntimeError):
    """A computation would exceed its memory budget."""
