"""Exception hierarchy for the gsip package."""


class GsipError(Exception):
    """Base class for all package errors."""


class DomainError(GsipError):
    """Position lies outside the domain of a mass profile or family."""


class NumericsError(GsipError):
    """A numerical routine failed to converge.

    ``level`` carries the eigenvalue index when raised by the eigensolver.
    """

    def __init__(self, message: str, level: int | None = None):
        super().__init__(message)
        self.level = level


class GridError(GsipError):
    """Grid too coarse or otherwise unusable."""


class MassError(GsipError):
    """Non-positive or non-finite mass encountered during discretization."""


class PotentialError(GsipError):
    """Non-finite potential value encountered during discretization."""


class PoleError(GsipError):
    """Evaluation requested too close to a pole of a closed-form family."""


class UnboundLevelError(GsipError):
    """Requested level lies outside the bound part of the spectrum."""


class NormalizabilityError(GsipError):
    """Parameters yield a non-normalizable ground state."""


class IndeterminateError(GsipError):
    """Endpoint sign test inconclusive; carries the sampled values."""

    def __init__(self, message: str, samples: tuple[float, float] | None = None):
        super().__init__(message)
        self.samples = samples


class ValidationError(GsipError):
    """A parameter or config field failed validation; names the field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class ConfigError(GsipError):
    """Config text failed to parse; carries line and column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.column = column
