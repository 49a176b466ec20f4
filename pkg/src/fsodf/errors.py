"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain where a function is defined."""


class PoleError(DomainError):
    """Argument sits on (or within guard distance of) a pole."""


class RangeError(ArithmeticError):
    """Result is not representable as a finite, non-zero float."""


class NonConvergenceError(RuntimeError):
    """A series or iteration failed to reach its stopping criterion."""


class ToleranceError(RuntimeError):
    """Adaptive quadrature could not meet the requested tolerance.

    ``estimate`` and ``error`` carry the best value and the achieved error
    estimate so callers can decide whether to accept it.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class CancellationError(NonConvergenceError):
    """A series converged but its terms cancel beyond the trusted precision.

    ``estimate`` is the estimated relative rounding error of the sum.
    """

    def __init__(self, message, estimate=float("inf")):
        super().__init__(message)
        self.estimate = estimate
