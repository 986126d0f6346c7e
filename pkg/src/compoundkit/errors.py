"""Exception hierarchy shared by all modules."""


class CompoundKitError(Exception):
    """Base class for library errors."""


class DimensionError(CompoundKitError, ValueError):
    """Shapes or orders are inconsistent with the requested operation."""


class GuardrailError(CompoundKitError, ValueError):
    """The requested object would exceed the desk-scale size limits."""


class IndexSetError(CompoundKitError, ValueError):
    """Malformed index set or out-of-range rank."""


class SingularMatrixError(CompoundKitError, ValueError):
    pass


class DefectiveMatrixError(CompoundKitError, ValueError):
    """Eigenvector matrix too ill-conditioned for a spectral matrix function."""


class BranchCutError(CompoundKitError, ValueError):
    """Fractional power requested for an eigenvalue on the closed negative real axis."""


class EigenConvergenceError(CompoundKitError, RuntimeError):
    pass


class PreconditionError(CompoundKitError, ValueError):
    """An operation's documented precondition does not hold."""


class CertificateError(CompoundKitError, ValueError):
    """A supplied or constructed certificate fails verification."""


class IntegrationError(CompoundKitError, RuntimeError):
    """Integration produced a non-finite state."""

    def __init__(self, message, last_time=None):
        super().__init__(message)
        self.last_time = last_time


class UnknownSystemError(CompoundKitError, KeyError):
    pass


class HorizonError(CompoundKitError, ValueError):
    """Truncation horizon too short for the requested Hankel quantity."""
