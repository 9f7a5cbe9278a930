"""Exception types shared across the package."""


class MinheatError(Exception):
    """Base class for all package errors."""


class InvalidProfileError(MinheatError):
    """Profile data violates a structural invariant (negativity, bad grid...)."""


class DomainTruncationError(MinheatError):
    """Requested domain does not cover the support of a compact profile."""


class InvalidScaleError(MinheatError):
    """Rescaling factor must be strictly positive."""


class UnsupportedKindError(MinheatError):
    """Operation is not defined for the requested model kind."""


class DivergenceError(MinheatError):
    """A quadrature failed to converge under refinement (genuinely infinite value)."""


class InfiniteRateError(MinheatError):
    """A physical rate was requested for a divergent geometric factor."""


class InversionError(MinheatError):
    """Correlator inversion hit a zero or negative sample."""


class PldUndefinedError(MinheatError):
    """Least-decoherence correlators undefined: a smearing transform vanishes."""

    def __init__(self, message, zeros=()):
        super().__init__(message)
        self.zeros = tuple(zeros)


class UsageError(MinheatError):
    """Bad command-line or configuration input."""
