"""Exception types shared across the package."""


class StableErgoError(Exception):
    """Base class for all package errors."""


class AlphaOutOfRange(StableErgoError):
    """Stability index outside the open interval (1, 2)."""


class DomainError(StableErgoError):
    """Argument outside the mathematical domain of an operation."""


class PreconditionError(StableErgoError):
    """A documented precondition of an operation was violated."""


class ParseError(StableErgoError):
    """Expression text could not be parsed.

    Carries the byte offset of the failure and the set of token kinds
    that would have been accepted there.
    """

    def __init__(self, message, offset, expected=()):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.expected = frozenset(expected)


class EvalError(StableErgoError):
    """Expression evaluation hit a domain fault (log of a nonpositive
    number, division by zero, fractional power of a negative base)."""


class NonPositiveSigma(StableErgoError):
    """The coefficient dropped to or below the positivity floor."""


class TailUndetermined(StableErgoError):
    """Tail exponent estimation did not converge; the finiteness of a
    criterion cannot be decided."""


class IntegralDiverged(StableErgoError):
    """Tail analysis shows the requested integral is infinite."""


class GridTooCoarse(StableErgoError):
    """Discretization grid cannot support a meaningful eigensolve."""


class NoConvergence(StableErgoError):
    """Iterative solver hit its iteration cap.  Carries the last residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class HorizonExceeded(StableErgoError):
    """Time-change inversion ran out of simulated driver path."""


class AllCensored(StableErgoError):
    """No Monte Carlo path reached the target before the horizon."""


class NotErgodic(StableErgoError):
    """Stationary-law estimation requested for a profile with infinite
    invariant mass."""


class SignalTooNoisy(StableErgoError):
    """No time window where the decay signal exceeds Monte Carlo noise."""
