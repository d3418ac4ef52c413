"""Exception types raised across the library."""


class MinvError(Exception):
    """Base class for all library errors."""


class ZeroMass(MinvError):
    """Operation needs positive mass (normalize, condition on a null set)."""


class DimensionMismatch(MinvError):
    """Point dimensions incompatible with a map or another measure."""


class RangeEscape(MinvError):
    """Pushforward onto a grid lost more mass than the tolerance allows."""


class SupportMismatch(MinvError):
    """Divergence requested between measures on different discrete supports."""


class InfiniteBound(MinvError):
    """Jensen lower bound is infinite (phi(0) = +inf with mass off the range)."""


class RankDeficient(MinvError):
    """Matrix does not have the full rank required by the operation."""


class EmptyRangeMass(MinvError):
    """Data measure has no mass on the range; conditioning is degenerate."""


class EmptyFiber(MinvError):
    """No candidate point satisfies the fiber tolerance for a data point."""


class RangeMismatch(MinvError):
    """Grid data has too much mass outside the image of the parameter domain."""


class PriorVanishes(MinvError):
    """Prior density is zero on cells that must carry solution mass."""


class NotConverged(MinvError):
    """Iterative solver exhausted its budget above the convergence tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SolverStall(MinvError):
    """Exact transport solver failed to return an optimal vertex."""


class TooLarge(MinvError):
    """Instance exceeds the size limit of a brute-force routine."""


class UnsupportedData(MinvError):
    """Fixture data lies outside the domain the fixture requires."""


class SpecError(MinvError):
    """Problem-spec file is malformed or inconsistent."""
