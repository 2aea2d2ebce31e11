'''Exceptions raised by pylevymlmc

All errors derive from PyLevyMlmcError; value-type errors additionally derive
from ValueError and numerical blow-ups from ArithmeticError.
'''


class PyLevyMlmcError(Exception):
    """Base class for all pylevymlmc errors"""
    pass


class ConfigError(PyLevyMlmcError, ValueError):
    """Malformed or inconsistent experiment configuration"""
    pass


class AssumptionViolation(PyLevyMlmcError, ValueError):
    """A model violates the standing assumptions (|Sigma|, |b|, second moment <= K)"""
    pass


class NonSymmetricError(PyLevyMlmcError, ValueError):
    """Matrix expected symmetric"""
    pass


class IndefiniteMatrixError(PyLevyMlmcError, ValueError):
    """Matrix has an eigenvalue below the negative tolerance"""
    pass


class UnsupportedMeasureError(PyLevyMlmcError, ValueError):
    """Quantity not available for this jump measure (e.g. no dominating function g)"""
    pass


class EmptyTailError(PyLevyMlmcError, ValueError):
    """Sampling requested from a jump tail of zero mass"""
    pass


class DegenerateSmallJumpsError(PyLevyMlmcError, ValueError):
    """Small-jump covariance singular on a subspace that is not axis-aligned"""
    pass


class DimensionMismatchError(PyLevyMlmcError, ValueError):
    """Array dimensions do not agree"""
    pass


class NotConstantCoefficientError(PyLevyMlmcError, ValueError):
    """Closed form requested for a coefficient that is not constant"""
    pass


class TauTooSmallError(PyLevyMlmcError, ValueError):
    """Budget tau too small for a scheduled level plan

    **Arguments**:
        - *message* = string : description
        - *minimal_tau* = float : smallest admissible budget found
    """

    def __init__(self, message, minimal_tau=None):
        super(TauTooSmallError, self).__init__(message)
        self.minimal_tau = minimal_tau


class NonFiniteStateError(PyLevyMlmcError, ArithmeticError):
    """Scheme state overflowed to a non-finite value

    **Arguments**:
        - *message* = string : description
        - *time* = float : grid time at which the state became non-finite

    **Optional Keywords**:
        - *level* = int : level index (set by the estimator)
        - *sample* = int : sample index (set by the estimator)
    """

    def __init__(self, message, time=None, **kwds):
        super(NonFiniteStateError, self).__init__(message)
        self.time = time
        self.level = kwds.get("level", None)
        self.sample = kwds.get("sample", None)

    def __str__(self):
        msg = super(NonFiniteStateError, self).__str__()
        if self.level is not None:
            msg += " (level %s, sample %s)" % (self.level, self.sample)
        if self.time is not None:
            msg += " at t = %g" % self.time
        return msg
