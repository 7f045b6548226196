"""Exception hierarchy shared across the package."""


class GrowthLabError(Exception):
    """Base class for all growthlab errors."""


class DimensionMismatch(GrowthLabError, ValueError):
    """Vector or matrix dimensions do not agree."""


class InvalidProbability(GrowthLabError, ValueError):
    """A probability vector has negative entries or does not sum to one."""


class MissingTransitionRow(GrowthLabError, ValueError):
    """A reachable Markov state has no transition row."""


class NotConverged(GrowthLabError, RuntimeError):
    """An iterative routine failed to converge (e.g. reducible chain)."""


class HistoryTooShort(GrowthLabError, ValueError):
    """A conditional query needs more history than was provided."""


class NonPositiveInput(GrowthLabError, ValueError):
    """Gross returns must be strictly positive."""


class EmptyDistribution(GrowthLabError, ValueError):
    """An empirical distribution with no atoms cannot be optimized."""


class ShapeMismatch(GrowthLabError, ValueError):
    """A context window does not have the expected layout."""


class PathMismatch(GrowthLabError, ValueError):
    """Two ledgers were produced on different market paths."""


class NotApplicable(GrowthLabError):
    """The requested diagnostic does not apply to this strategy."""


class ConfigError(GrowthLabError, ValueError):
    """An experiment configuration failed validation."""
