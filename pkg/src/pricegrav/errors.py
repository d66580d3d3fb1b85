"""Exception hierarchy shared by every pricegrav module."""


class PriceGravError(Exception):
    """Base class for all errors raised by pricegrav."""


class SingularMatrix(PriceGravError, ArithmeticError):
    """No usable pivot was found while eliminating a column."""

    def __init__(self, message="matrix is singular", column=None):
        super().__init__(message)
        self.column = column


class NegativeEntry(PriceGravError, ValueError):
    """A matrix required to be nonnegative has a negative entry."""


class NotIrreducible(PriceGravError, ValueError):
    """A matrix required to be irreducible is reducible."""


class NoConvergence(PriceGravError, RuntimeError):
    """An iterative method hit its iteration cap."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class ZeroSpectralRadius(PriceGravError, ArithmeticError):
    """The spectral radius is zero, so 1/rho is undefined."""


class NonpositivePrices(PriceGravError, ArithmeticError):
    """A steady-state price vector has an entry <= 0."""


class NonpositivePricesWarning(UserWarning):
    """Raised as a warning where positivity is not guaranteed by theory."""


class NonFiniteState(PriceGravError, FloatingPointError):
    """The integrated state overflowed or became NaN."""

    def __init__(self, step, time=None):
        msg = f"non-finite state at step {step}"
        if time is not None:
            msg += f" (t = {time:.17g})"
        super().__init__(msg)
        self.step = step
        self.time = time


class InvalidParams(PriceGravError, ValueError):
    """Parameters outside the admissible domain of an operation."""
