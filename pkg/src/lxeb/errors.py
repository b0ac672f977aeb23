class CapacityError(ValueError):
    """Requested qubit count exceeds the configured statevector limit."""


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""
