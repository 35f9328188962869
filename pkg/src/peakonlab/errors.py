"""Exception types shared across the package."""


class PeakonLabError(Exception):
    """Base class for all package-specific errors."""


class GridError(PeakonLabError):
    """Structural problem with a grid (non-monotone, missing peak node, ...)."""


class InputDataError(PeakonLabError):
    """Non-finite or otherwise invalid numerical input."""


class ExtrapolationError(PeakonLabError):
    """Requested evaluation point lies outside the grid support."""


class JumpGenerationError(PeakonLabError):
    """Initial data with a nonzero value at the peak.

    Such data instantly generates a finite jump discontinuity of the
    solution at the peak, so it is rejected by the linearized solver.
    """


class ConfigurationError(PeakonLabError):
    """Invalid run configuration (bad scenario, under-resolved grid, ...)."""


class IntegrationError(PeakonLabError):
    """Time stepping produced non-finite values."""


class CollisionError(PeakonLabError):
    """Two peakon positions collided; continuation is out of scope."""

    def __init__(self, t: float, message: str | None = None):
        self.t = t
        super().__init__(message or f"peakon collision at t={t:.6g}")
