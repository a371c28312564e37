"""Exception types shared across the package."""


class DegenerateModel(ValueError):
    """Raised when the process has zero total variance (no Gaussian part, no jumps)."""


class InfiniteVariance(ValueError):
    """Raised when the jump measure's second moment diverges for the given parameters."""


class InvalidParameter(ValueError):
    """Raised when a family parameter violates its admissible range."""


class MalformedDocument(ValueError):
    """Raised when a model JSON document is structurally invalid."""


class UnsupportedMeasure(TypeError):
    """Raised when a measure does not provide a jump sampler."""


class DivergentRequest(ValueError):
    """Raised when a requested tail moment is infinite for the given measure."""


class QuadratureError(RuntimeError):
    """Raised when adaptive quadrature cannot reach the requested tolerance."""


class IdentityViolation(RuntimeError):
    """Raised when an always-on internal cross-check between two integral
    representations of the same quantity fails."""


class EmptySample(ValueError):
    """Raised when a distance estimate is requested for an empty sample."""


class NonpositiveScale(ValueError):
    """Raised when a Gaussian reference scale is not strictly positive."""


class DomainError(ValueError):
    """Raised when a scalar function is evaluated outside its domain."""
