"""Exception types shared across the package."""


class SaddleLabError(Exception):
    """Base class for all package errors."""


class SurfaceValidationError(SaddleLabError, ValueError):
    """A surface document or constructed surface violates an invariant."""


class ParameterError(SaddleLabError, ValueError):
    """An experiment parameter set violates a requirement inequality."""


class ResourceLimitExceeded(SaddleLabError, RuntimeError):
    """Enumeration exceeded its developed-triangle budget.

    Signals that the requested radius is too large for the configured cap.
    """


class IncompleteSpectrumError(SaddleLabError, ValueError):
    """A filter needs connections beyond the spectrum's complete radius."""


class QuadratureError(SaddleLabError, RuntimeError):
    """Iterated quadrature failed to stabilise under refinement."""
