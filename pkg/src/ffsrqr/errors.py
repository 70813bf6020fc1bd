"""Exception types shared across the library."""


class DimensionError(ValueError):
    """Inputs have incompatible or out-of-range shapes/ranks."""


class SingularTrailingBlockError(RuntimeError):
    """A triangular factor needed for a solve has a zero diagonal entry."""


class CertificationError(RuntimeError):
    """The spectrum-revealing swap loop exceeded its iteration cap.

    Carries the best iterate found so far in ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NumericalError(RuntimeError):
    """Non-finite data or a numerically failed computation."""
