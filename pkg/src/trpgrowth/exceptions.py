"""Exception types raised across the package."""


class TrpError(Exception):
    """Base class for all errors raised by trpgrowth."""


class NonPositivePrice(TrpError, ValueError):
    pass


class BadPmf(TrpError, ValueError):
    pass


class TechnicalConditionViolated(TrpError, ValueError):
    """Some log-ratio step is too large for the no-trade interval."""


class ToleranceTooCoarse(TrpError, ValueError):
    """Rational approximation of the log-ratios is ambiguous at an interval edge."""


class StateCapExceeded(TrpError, RuntimeError):
    """A finite state space is larger than the allowed cap.

    The partial enumeration is kept on ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class StateExplosion(TrpError, RuntimeError):
    pass


class NoConvergence(TrpError, RuntimeError):
    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class NoFeasiblePoint(TrpError, ValueError):
    pass


class EmptyObservations(TrpError, ValueError):
    pass


class PathTooShort(TrpError, ValueError):
    pass
