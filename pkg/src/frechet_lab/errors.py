"""Exception hierarchy shared by all modules."""


class FrechetLabError(Exception):
    """Base class for every error raised by frechet_lab."""


class InvalidInput(FrechetLabError, ValueError):
    pass


class OutOfRegime(FrechetLabError, ValueError):
    """A formula was evaluated outside the regime where it holds."""


class OutOfDomain(FrechetLabError, ValueError):
    pass


class InvalidDensity(FrechetLabError):
    pass


class AntipodalPoint(FrechetLabError, ValueError):
    pass


class DegenerateEigengap(FrechetLabError):
    pass


class DegenerateRegression(FrechetLabError):
    pass


class TooLarge(FrechetLabError, ValueError):
    pass


class Empty(FrechetLabError, ValueError):
    """An empty feasible set was requested."""


class MaxIterations(FrechetLabError):
    """An iterative solver hit its iteration cap.

    The last iterate is kept on ``last_iterate`` so callers can inspect it.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class EstimatorError(FrechetLabError):
    """An estimator failed inside a Monte Carlo replication."""

    def __init__(self, replication, cause):
        super().__init__(f"estimator failed on replication {replication}: {cause!r}")
        self.replication = replication
        self.cause = cause
