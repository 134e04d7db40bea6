"""Exception types raised across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a formula."""


class BoundInvalidError(ValueError):
    """A bound was requested where its denominator is not positive."""


class UnsupportedOrderError(ValueError):
    pass


class PreconditionError(ValueError):
    """An operation's stated precondition does not hold."""


class ConfigurationError(ValueError):
    pass


class NoSteadyStateError(ValueError):
    """The drift matrix is not Hurwitz, so no stationary moments exist."""


class ConvergenceError(RuntimeError):
    """Adaptive quadrature ran out of subdivisions.

    The best available ``estimate`` and its ``error`` bound are kept so the
    caller can decide whether the partial result is usable.
    """

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class IntegrationError(RuntimeError):
    """Fixed-step ODE integration failed its Richardson tolerance check."""

    def __init__(self, message, time, state):
        super().__init__(message)
        self.time = time
        self.state = state
