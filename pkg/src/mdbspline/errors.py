"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`MDSplineError`,
which itself is a :class:`ValueError`. The CLI maps the two top-level families
(:class:`ConfigError` and everything else) onto distinct exit codes.
"""


class MDSplineError(ValueError):
    """Base class for all library errors."""


class ConfigError(MDSplineError):
    """Invalid input data: knot vectors, configurations, config files."""


class InvalidKnotVector(ConfigError):
    pass


class TooShort(InvalidKnotVector):
    pass


class NonDecreasingViolated(InvalidKnotVector):
    pass


class NotOpen(InvalidKnotVector):
    pass


class MultiplicityExceeded(InvalidKnotVector):
    pass


class InvalidConfiguration(ConfigError):
    pass


class PeriodicOrderTooHigh(InvalidConfiguration):
    pass


class NonPositiveDimension(InvalidConfiguration):
    pass


class OutOfDomain(MDSplineError):
    pass


class OrderTooHigh(MDSplineError):
    pass


class DimensionMismatch(MDSplineError):
    pass


class RankDeficient(MDSplineError):
    pass


class NotNested(MDSplineError):
    pass


class IntervalMismatch(NotNested):
    pass


class SegmentCountMismatch(NotNested):
    pass


class NoConstraints(MDSplineError):
    pass


class NonContiguousBlock(MDSplineError):
    pass


class ZeroVector(NonContiguousBlock):
    """The constraint column is identically zero (nothing to eliminate)."""


class BlockSumNonzero(MDSplineError):
    pass
