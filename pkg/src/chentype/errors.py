"""Exception hierarchy shared by every chentype module."""


class ChentypeError(Exception):
    """Base class for all errors raised by the package."""


class OrderMismatchError(ChentypeError, ValueError):
    """Two jets of different truncation order were combined."""


class InsufficientOrderError(ChentypeError, ValueError):
    """A jet does not carry enough derivatives for the requested operation."""


class SingularCompositionError(ChentypeError, ValueError):
    """A univariate function was composed at a singular value."""

    def __init__(self, func, value):
        self.func = func
        self.value = value
        super().__init__(f"cannot compose {func} at base value {value!r}")


class DomainError(ChentypeError, ValueError):
    """A chart point lies outside the parameter domain."""


class SpecParseError(ChentypeError, ValueError):
    """A surface spec document could not be parsed or validated."""

    def __init__(self, message, location="$"):
        self.location = location
        super().__init__(f"{location}: {message}")


class RegularityError(ChentypeError, ValueError):
    """The chart is not an immersion at the base point."""


class ParabolicPointError(ChentypeError, ValueError):
    """The second fundamental form degenerates (K = 0) at the base point."""


class ConfigurationError(ChentypeError, ValueError):
    """Run parameters are inconsistent (order budget, grid size, ...)."""


class NormalizationError(ChentypeError, ValueError):
    """A ruled surface violates the unit-ruling normalization."""

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)
