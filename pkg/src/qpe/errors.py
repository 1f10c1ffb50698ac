"""Exception hierarchy shared by every module."""


class QPEError(Exception):
    """Base class for all library errors."""


class ValidationError(QPEError, ValueError):
    """Input failed a type invariant (e.g. a matrix that is not unitary)."""


class ShapeError(QPEError, ValueError):
    """Dimension mismatch or index out of range."""


class CapacityError(QPEError):
    """Result would exceed the configured dimension cap."""


class NumericalInstabilityError(QPEError, ArithmeticError):
    """Eigensolver output drifted too far from the unit circle."""


class DomainError(QPEError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class UndefinedCorrelationError(QPEError, ValueError):
    """Correlation is undefined, typically because a series is constant."""


class IngestionError(QPEError):
    """CSV input could not be read into a point cloud."""
