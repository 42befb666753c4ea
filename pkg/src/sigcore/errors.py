"""Exception hierarchy. The CLI maps each family onto a stable exit code."""


class SigcoreError(ValueError):
    """Base class for all library errors."""


class ModelError(SigcoreError):
    """Malformed or invalid input description (bad parameters, bad JSON shape)."""


class ArityMismatch(SigcoreError):
    """Objects built for different component counts were combined."""


class NotSemicoherent(SigcoreError):
    """A structure function fails the boundary or monotonicity conditions."""


class NotSamplable(SigcoreError):
    """The lifetime model carries no distribution to draw from."""


class RouteError(SigcoreError):
    """The requested computation route does not apply to the given model."""


class NumericalError(SigcoreError):
    """A numerical procedure failed or produced an out-of-tolerance result."""


class QuadratureError(NumericalError):
    def __init__(self, message: str, subset: tuple[int, ...] | None = None):
        super().__init__(message)
        self.subset = subset
