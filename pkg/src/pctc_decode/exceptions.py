"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Operand shapes or wire lists are incompatible."""


class DegenerateOutcomeError(ArithmeticError):
    """A postselected outcome has (numerically) zero probability."""


class InsufficientStatisticsError(RuntimeError):
    """A tomography basis ended up with no postselected shots."""

    def __init__(self, basis, message=None):
        self.basis = basis
        super().__init__(message or f"no postselected shots in basis {basis}")
