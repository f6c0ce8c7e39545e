"""Exception types raised across the package."""


class GeometryError(ValueError):
    """Base class for all domain errors."""


class EmptyInput(GeometryError):
    pass


class DimensionMismatch(GeometryError):
    pass


class ZeroDirection(GeometryError):
    pass


class ParameterOutOfRange(GeometryError):
    pass


class NonpositiveScale(GeometryError):
    pass


class SingularMatrix(GeometryError):
    pass


class NotASimilarity(GeometryError):
    pass


class InvalidBounds(GeometryError):
    pass


class DegenerateBody(GeometryError):
    """The body does not have the dimension the operation needs."""


class UnsupportedDimension(GeometryError):
    pass


class NoConvergence(GeometryError, RuntimeError):
    pass


class TooManyVertices(GeometryError):
    pass


class GroupClosureError(GeometryError, RuntimeError):
    """A numerically enumerated stabilizer failed the closure check."""


class UnsupportedGroup(GeometryError):
    pass


class EmptyScenario(GeometryError):
    pass


class StabilizerViolation(GeometryError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"target {index} is moved by a stabilizer element of its anchor")


class OrbitCollision(GeometryError):
    def __init__(self, i, j, message=None):
        self.pair = (i, j)
        super().__init__(message or f"anchors {i} and {j} lie in the same orbit")


class OutsideNeighborhood(GeometryError):
    pass


class AmbiguousSupport(GeometryError, RuntimeError):
    pass


class DegenerateSegment(GeometryError):
    pass


class InvalidDelta(GeometryError):
    pass


class SamplingStarvation(GeometryError, RuntimeError):
    pass


class NotConstantWidth(GeometryError):
    pass
