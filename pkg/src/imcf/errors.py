class IMCFError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(IMCFError, ValueError):
    """Coordinate time outside the spacetime slab."""


class ContractViolation(IMCFError, ValueError):
    """An argument broke a documented precondition."""


class GeometryError(IMCFError):
    """A graph state is not a valid spacelike hypersurface."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class SpacelikeViolation(GeometryError):
    pass


class AdmissibilityError(GeometryError):
    """Mean curvature is not positive somewhere."""


class StepRejected(IMCFError):
    """A time step produced an invalid state or exceeded the stability bound."""


class NumericalFailure(IMCFError):
    """Repeated step rejection; carries the last valid trajectory record."""

    def __init__(self, message, last_record=None):
        super().__init__(message)
        self.last_record = last_record


class ConfigError(IMCFError, ValueError):
    """Invalid scenario configuration or a failed admission gate."""


class CurveFormatError(IMCFError, ValueError):
    pass
