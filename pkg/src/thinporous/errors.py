"""Exception hierarchy shared by all thinporous modules."""


class ThinPorousError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(ThinPorousError, ValueError):
    """An argument violates a documented precondition or invariant."""


class GeometryError(ThinPorousError, ValueError):
    """A cell geometry is invalid or produces a disconnected fluid region."""


class DomainError(ThinPorousError, ValueError):
    """An evaluation point lies outside the computational domain."""


class NumericalError(ThinPorousError, RuntimeError):
    """An iterative solver or quadrature failed to reach its tolerance.

    Carries whatever diagnostics the failing routine could salvage
    (last residual, bracket, iteration history) in ``details``.
    """

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class ConfigError(ThinPorousError, ValueError):
    """A run configuration is missing a field or violates an invariant.

    ``field`` holds the dotted path of the offending entry.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
