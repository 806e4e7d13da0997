"""Exception types raised across the package."""


class ReplicaPortfolioError(Exception):
    """Base class for every error raised by this package."""


class InvalidPopulationError(ReplicaPortfolioError, ValueError):
    pass


class InvalidProblemError(ReplicaPortfolioError, ValueError):
    pass


class DegeneratePopulationError(ReplicaPortfolioError, ValueError):
    """Raised when r is (numerically) proportional to c, so the cost and
    return constraints collapse onto one direction in moment space."""


class AlphaOutOfRangeError(ReplicaPortfolioError, ValueError):
    pass


class InvalidSpecError(ReplicaPortfolioError, ValueError):
    pass


class SingularMatrixError(ReplicaPortfolioError, ArithmeticError):
    pass


class CollinearConstraintsError(ReplicaPortfolioError, ArithmeticError):
    pass


class NonPositiveRiskError(ReplicaPortfolioError, ValueError):
    pass


class VertexAtOriginError(ReplicaPortfolioError, ValueError):
    """The Sharpe-ratio argmax is undefined because the risk vertex sits at
    the zero-excess-return point."""


class TrialError(ReplicaPortfolioError):
    """A single Monte Carlo trial failed; wraps the underlying cause."""

    def __init__(self, trial_index: int, cause: Exception):
        super().__init__(f"trial {trial_index} failed: {cause}")
        self.trial_index = trial_index
        self.cause = cause


class ExperimentFailedError(ReplicaPortfolioError):
    pass


class ConfigError(ReplicaPortfolioError, ValueError):
    pass


class NumericalConditioningWarning(RuntimeWarning):
    pass
