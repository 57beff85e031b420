"""Exception hierarchy shared by all modules."""


class CausticsError(Exception):
    """Base class for all library errors."""


class DomainError(CausticsError):
    """A point or path left the chart's safety rectangle."""


class ConstructionError(CausticsError):
    """A chart, curve, or derived object violates its invariants."""


class DegenerateCoordinatesError(CausticsError):
    """Coordinate transform evaluated on its singular locus."""


class ConditioningError(CausticsError):
    """A solve was refused because the problem is numerically ill-posed."""


class BVPError(CausticsError):
    """Two-point geodesic shooting failed to converge."""


class IntersectionError(CausticsError):
    """Tangent geodesics do not cross inside the trust region."""


class RangeError(CausticsError):
    """A requested parameter lies outside the valid trust region."""


class GrazingError(CausticsError):
    """Billiard shot too close to tangency with the table."""


class ReconstructionError(CausticsError):
    """A Liouville reconstruction postcondition failed badly.

    Carries the name of the stage that failed.
    """

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"{stage}: {message}")
