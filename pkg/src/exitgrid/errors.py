"""Exception types shared across the library."""


class ExitgridError(Exception):
    """Base class for all library-specific errors."""


class InvalidDomainError(ExitgridError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class NoConvergenceError(ExitgridError):
    """A truncated series hit its term cap before the tail bound was met."""


class ToleranceNotMetError(ExitgridError):
    """A quadrature or root-finding routine could not reach the requested tolerance."""


class UnstableStepError(ExitgridError):
    """The renewal solver's time step is too coarse for the kernel."""


class HorizonTooShortError(ExitgridError):
    """A renewal grid does not extend far enough for the requested evaluation time."""


class DegenerateSampleError(ExitgridError, ValueError):
    """A sample has zero spread and cannot be smoothed."""


class UnboundedIntegralError(ExitgridError):
    """A distance integral has non-integrable tails for the given arguments."""


class ConfigError(ExitgridError, ValueError):
    """A CLI/experiment configuration is malformed."""
