"""Exception types shared by all solver modules."""


class WatchrouteError(Exception):
    """Base class for all library errors."""


class NonSimplePolygon(WatchrouteError):
    """Polygon boundary self-intersects or is otherwise invalid."""


class PointOutsideDomain(WatchrouteError):
    """A query point lies outside the (closed) domain."""


class SegmentLeavesDomain(WatchrouteError):
    """A generator segment is not fully contained in the domain."""


class RegionOutsideDomain(WatchrouteError):
    """A measure query region is not contained in the domain."""


class InvalidEpsilon(WatchrouteError):
    """An approximation parameter is outside (0, 1]."""


class InfeasibleQuota(WatchrouteError):
    """Requested quota exceeds what the domain can provide."""


class CandidateCapExceeded(WatchrouteError):
    """Discretization or DP size would exceed the configured resource cap."""


class TourOutsideWindow(WatchrouteError):
    """A tour to be snapped leaves the discretization window."""


class QuotaExceedsLines(WatchrouteError):
    """Line-arrangement quota larger than the number of lines."""


class AllParallel(WatchrouteError):
    """Line arrangement is disconnected because all lines are parallel."""


class DepthExceeded(WatchrouteError):
    """Recursive-greedy depth budget exhausted (recoverable)."""


class CapExceeded(WatchrouteError):
    """Brute-force oracle instance larger than its cap."""
