"""Exception hierarchy shared across the package."""


class MgfMargError(Exception):
    """Base class for all package-specific errors."""


class DomainError(MgfMargError, ValueError):
    """An mgf (or pmf/pdf) was evaluated at or beyond its radius of convergence."""


class DivergenceError(MgfMargError, ValueError):
    """A requested quantity is a divergent integral or series."""


class QuadratureError(MgfMargError, RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class NonPositiveConstantTermError(MgfMargError, ValueError):
    """Series power/log requires a strictly positive constant term."""


class ShapeMismatchError(MgfMargError, ValueError):
    """Series operands have incompatible dims or truncation orders."""


class SeriesSizeError(MgfMargError, ValueError):
    """A requested coefficient tensor or derivative order exceeds the guard."""


class UnsupportedFractionalError(MgfMargError, ValueError):
    """No fractional-derivative route exists for this prior family."""


class ConsistencyError(MgfMargError, RuntimeError):
    """Two mathematically equivalent computation routes disagreed."""


class NegativeRateRiskError(MgfMargError, ValueError):
    """A model specification can produce non-positive Poisson/gamma rates."""


class NonIntegerShapeWithCouplingError(MgfMargError, ValueError):
    """Coupled random-effect blocks require integer gamma shapes."""


class TableFormatError(MgfMargError, ValueError):
    """A data table could not be parsed."""


class ConfigError(MgfMargError, ValueError):
    """A run configuration file is malformed or inconsistent.

    ``field`` names the offending entry so the CLI can point at it.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"config field '{field}': {message}")
        self.field = field
