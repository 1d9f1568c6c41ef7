"""Exception types shared across the simulator."""

__all__ = [
    "OpsSimError",
    "ConfigurationError",
    "DelayRangeError",
    "EnergyConsistencyError",
    "BudgetError",
    "EnvUsageError",
]


class OpsSimError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(OpsSimError, ValueError):
    """A config value is missing, unknown, of the wrong type, or out of range."""


class DelayRangeError(OpsSimError, ValueError):
    """A requested delay would push pulse energy outside the sampled window."""


class EnergyConsistencyError(OpsSimError, ArithmeticError):
    """A computed energy violates the bounds guaranteed by the physics model."""


class BudgetError(OpsSimError, RuntimeError):
    """An exhaustive search would exceed its configured evaluation budget."""


class EnvUsageError(OpsSimError, RuntimeError):
    """Environment protocol misuse, e.g. step() before reset() or after close()."""
