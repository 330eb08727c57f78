"""Exception hierarchy shared by all modules."""


class EllipticGinoeError(Exception):
    """Base class for all package errors."""


class DomainError(EllipticGinoeError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class DegenerateArgumentError(DomainError):
    """Parameter value at which a formula degenerates (use the dedicated route)."""


class PoleError(DomainError):
    """Evaluation at a pole of the function."""


class EndpointError(DomainError):
    """Saddle solve requested at k = 0 or k = N/2, where the tilt degenerates."""


class PrecisionOverflowError(EllipticGinoeError, OverflowError):
    """A computation left the representable exponent range of the backend."""


class ConvergenceError(EllipticGinoeError, RuntimeError):
    """An iteration failed to converge within its budget.

    Carries the last residual (when meaningful) and the iteration count.
    """

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class FactorizationViolationError(EllipticGinoeError):
    """A Bernoulli parameter left (0, 1) beyond tolerance.

    Signals failure of positive definiteness or of the lambda < 1 property,
    both of which the factorized generating function relies on.
    """


class CrossCheckError(EllipticGinoeError):
    """Two independent computation routes disagreed beyond tolerance."""


class ReliabilityWarning(UserWarning):
    """Results are usable but a quality indicator degraded (e.g. discarded trials)."""
