"""Exception and warning types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when arguments violate a documented precondition."""


class NumericError(ArithmeticError):
    """Raised when a linear algebra routine fails or is unreliable."""


class NearSingularError(NumericError):
    """The smallest singular value fell below the degeneracy floor."""

    def __init__(self, sigma_min, threshold):
        self.sigma_min = sigma_min
        self.threshold = threshold
        super().__init__(
            f"sigma_min = {sigma_min:.3e} below threshold {threshold:.0e}"
        )


class PrecisionWarning(UserWarning):
    """Grid refinement hit its size cap before the value stabilised."""
