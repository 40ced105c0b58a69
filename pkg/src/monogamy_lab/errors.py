"""Exception types shared across the package."""


class MonogamyLabError(Exception):
    """Base class for all package-specific errors."""


class DomainError(MonogamyLabError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class InvalidPartitionError(MonogamyLabError, ValueError):
    """A qubit partition is inconsistent with the register it addresses."""


class DimensionMismatchError(MonogamyLabError, ValueError):
    """Operands live on registers of incompatible dimension."""


class ContractViolationError(MonogamyLabError, ValueError):
    """An input or intermediate value violates a numerical contract."""


class ResourceCapError(MonogamyLabError, RuntimeError):
    """A request exceeds the dense-simulation size cap."""


class ConfigError(MonogamyLabError, ValueError):
    """A run configuration is malformed."""


class ExtrapolationError(MonogamyLabError, ValueError):
    """A query lies outside the observed range of a calibration curve."""


class UndefinedScoreError(MonogamyLabError, ValueError):
    """A statistic is undefined for the given (degenerate) input."""
