"""Exception hierarchy shared by every module."""


class GeometryError(Exception):
    """Base class for all numerical-geometry failures."""


class DimensionError(GeometryError, ValueError):
    pass


class DomainError(GeometryError, ValueError):
    """A chart or metric was evaluated outside its declared domain."""


class StepTooLargeError(DomainError):
    """The finite-difference stencil would leave the domain."""


class DegenerateMetricError(GeometryError):
    pass


class DegeneratePlaneError(GeometryError):
    pass


class EquatorialSingularityError(GeometryError):
    """Projection attempted from a point with vanishing last coordinate."""


class ProjectiveConeError(GeometryError):
    """Lift attempted on or beyond the projective cone 1 + sigma^2/R^2 <= 0."""


class RankDeficientJacobianError(GeometryError):
    pass


class NonTangentFieldError(GeometryError):
    """Ambient field is not tangent to the embedded surface."""


class StepUnderflowError(GeometryError):
    pass


class ConfigError(ValueError):
    pass
