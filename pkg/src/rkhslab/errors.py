"""Exception hierarchy shared by all modules."""


class RKHSLabError(Exception):
    """Base class for library errors."""


class ParameterDomainError(RKHSLabError, ValueError):
    """A kernel or operation parameter lies outside its admissible range."""


class SeriesDivisionError(RKHSLabError, ZeroDivisionError):
    """Power-series inversion attempted with a vanishing constant term."""


class PointDomainError(RKHSLabError, ValueError):
    """A point lies outside the domain where the kernel series is evaluated."""


class ImproperIdealError(RKHSLabError, ValueError):
    """The ideal contains a nonzero constant."""


class NilpotencyError(RKHSLabError, ValueError):
    """Auto-nilpotent mode requested for a tuple that is not jointly nilpotent."""


class TruncationError(RKHSLabError, ValueError):
    """Requested order exceeds the available truncation."""


class CNPViolationError(RKHSLabError, ValueError):
    """Operation needs nonnegative inverted-series coefficients."""


class NotPSDError(RKHSLabError, ValueError):
    """Matrix expected to be positive semidefinite is not."""


class PreconditionError(RKHSLabError, ValueError):
    """A mathematical precondition of a construction fails."""


class DegeneracyError(RKHSLabError, ArithmeticError):
    """Numerical degeneracy (e.g. failed simultaneous triangularization)."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class DegenerateSampleError(RKHSLabError, ArithmeticError):
    """Kernel Gram matrix on a sample is numerically singular."""


class SingularKernelError(RKHSLabError, ZeroDivisionError):
    """Kernel vanishes at a sample pair where it is used as a denominator."""


class NonHermitianError(RKHSLabError, ValueError):
    """Input expected to be Hermitian is not (to the relative tolerance)."""
