"""Exception types raised by the numerical core."""


class OqeigError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(OqeigError):
    pass


class NotHermitian(OqeigError):
    pass


class NotPositiveDefinite(OqeigError):
    pass


class ExactlySingular(OqeigError):
    """A pivot collapsed to (numerical) zero during elimination."""


class SingularMatrix(OqeigError):
    pass


class SingularPencilFamily(OqeigError):
    """No probed linear combination of the pencil matrices is invertible."""


class NotSelfAdjoint(OqeigError):
    pass


class NInKernel(OqeigError):
    """The vector x satisfies Nx = 0; quotients are undefined there."""


class ZeroVector(OqeigError):
    pass


class PhaseUndefined(OqeigError):
    """(Mx, Nx)_P vanished, so the optimal quotient has no phase factor."""


class AtDiscontinuity(OqeigError):
    """mu coincides with the Rayleigh quotient, the one discontinuity point."""


class NonConvergence(OqeigError):
    """Iteration budget exhausted.  Carries the best result found so far."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class SingularShift(OqeigError):
    """The shifted matrix M - zeta*N is singular, zeta is an eigenvalue."""


class InfiniteEigenvalue(OqeigError):
    """A zero eigenvalue of a shift-inverted pencil maps back to infinity."""


class DirectionNegligible(OqeigError):
    """Descent direction vanished after orthogonalization (stationary point)."""


class DeflationCollapse(OqeigError):
    """Deflation removed (numerically) all of the vector."""


class ParseError(OqeigError):
    """Malformed Matrix Market input; carries the offending line number."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = "line %d: %s" % (lineno, message)
        super().__init__(message)
        self.lineno = lineno
