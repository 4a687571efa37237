"""Exception and warning types raised across larckit."""


class LarcError(Exception):
    """Base class for larckit errors."""


class DimensionMismatch(LarcError, ValueError):
    pass


class NotHermitian(LarcError, ValueError):
    pass


class NotAntiHermitian(LarcError, ValueError):
    pass


class EmptyInput(LarcError, ValueError):
    pass


class HorizonExhausted(LarcError):
    """No solution was found inside the search horizon.

    ``best`` holds the best candidate seen (a ``KroneckerCertificate`` with
    ``success=False``) so callers can report it or retry with a larger
    horizon.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class HypothesesNotMet(LarcError):
    pass


class PathNotFound(LarcError):
    pass


class RandomElementDegenerate(LarcError):
    pass


class ConfigError(LarcError, ValueError):
    pass


class IndependenceWarning(UserWarning):
    """Issued when a search assumes rationally independent frequencies but
    the supplied spectrum is (numerically) dependent."""
