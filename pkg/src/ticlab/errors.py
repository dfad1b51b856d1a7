"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class AdmissibilityError(ValueError):
    """A control or path violates its admissibility constraints."""


class ShapeError(ValueError):
    """Structured input is missing required entries."""


class ConfigurationError(ValueError):
    """Invalid run configuration."""
