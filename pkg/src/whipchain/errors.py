"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised for malformed or invalid experiment configuration files."""


class NumericError(RuntimeError):
    """Raised when integration or a linear solve produces NaN/Inf state."""


class FitRejected(Exception):
    """Signal that a blowup fit was not attempted (non-monotone or short tail)."""
