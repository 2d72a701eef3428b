"""Exception types shared across the package."""


class ChronoscaleError(Exception):
    """Base class for all package errors."""


class ConstructionError(ChronoscaleError, ValueError):
    """Invalid input while building a time scale or config object."""


class DomainError(ChronoscaleError, ValueError):
    """A point or endpoint lies outside the relevant time scale."""


class AccuracyError(ChronoscaleError, RuntimeError):
    """Adaptive quadrature failed to converge within the depth budget.

    Carries the best available estimate and a bound on its error so callers
    can decide whether the value is still usable.
    """

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(f"{message} (best estimate {estimate!r}, error bound {error_bound!r})")
        self.estimate = estimate
        self.error_bound = error_bound


class ExprSyntaxError(ChronoscaleError, ValueError):
    """Expression text could not be parsed; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ExprEvalError(ChronoscaleError, ValueError):
    """Expression evaluation hit a domain violation (division by zero, log of
    a non-positive base, non-finite intermediate)."""


class MisuseError(ChronoscaleError, ValueError):
    """An oracle or helper was invoked outside its supported setting."""
