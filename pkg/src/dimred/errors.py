"""Exception types shared across the package."""


class SizeError(ValueError):
    """Requested size exceeds a configured cap or an unsupported combination."""


class UnsupportedOperationError(TypeError):
    """Operation not defined for this object (e.g. pointwise delta evaluation)."""


class SingularSeriesError(ZeroDivisionError):
    """Series cannot be inverted because its linear coefficient vanishes."""


class RootError(ArithmeticError):
    """Root finder failed to converge for a given branch."""

    def __init__(self, message, branch=None):
        super().__init__(message)
        self.branch = branch


class AccuracyError(ArithmeticError):
    """Requested accuracy was not reached; carries the best estimate so far."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class AccuracyWarning(UserWarning):
    """Result returned, but the requested tolerance may not be met."""


class NonSmoothPointError(ValueError):
    """Evaluation requested too close to a point where the function is not smooth."""
