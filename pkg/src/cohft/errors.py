"""Exception types raised across the package."""


class CohFTError(Exception):
    """Base class for all errors raised by :mod:`cohft`."""


class UnstablePair(CohFTError, ValueError):
    """Raised when ``2g - 2 + n <= 0``."""

    def __init__(self, g, n):
        super().__init__(f"(g, n) = ({g}, {n}) is not in the stable range 2g-2+n > 0")
        self.g = g
        self.n = n


class NonDivisible(CohFTError, ArithmeticError):
    """A bivariate numerator does not vanish on ``z = -w``."""


class NonSymplectic(CohFTError, ValueError):
    """An R-matrix fails ``R(z) R*(-z) = Id``."""


class SingularPairing(CohFTError, ValueError):
    pass


class MismatchedTruncation(CohFTError, ValueError):
    """Two truncated series of different order (or variable) were combined."""


class RangeError(CohFTError, ValueError):
    pass


class SizeMismatch(CohFTError, ValueError):
    pass


def check_stable(g, n):
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        raise UnstablePair(g, n)
