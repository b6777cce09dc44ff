"""Process parameters and series-evaluation settings."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidDomainError


@dataclass(frozen=True)
class ModelParams:
    """Diffusion scale and detection threshold.

    sigma : diffusion coefficient of ``X_t = sigma * W_t`` (space/sqrt(time)).
    eta   : half-width of the detection band (space).

    Both must be strictly positive; ``eta**2 / sigma**2`` is the natural
    time scale of the scheme.
    """

    sigma: float
    eta: float

    def __post_init__(self) -> None:
        if not (self.sigma > 0.0):
            raise InvalidDomainError(f"sigma must be > 0, got {self.sigma}")
        if not (self.eta > 0.0):
            raise InvalidDomainError(f"eta must be > 0, got {self.eta}")

    @property
    def timescale(self) -> float:
        """Mean time between detections, eta^2 / sigma^2."""
        return self.eta**2 / self.sigma**2


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation control for the two series representations.

    term_tol     : absolute bound below which the next term is dropped.
    max_terms    : hard cap on summed terms before NoConvergenceError.
    switch_ratio : threshold on the dimensionless time sigma^2*t/eta^2;
                   below it the Gaussian-image form is used, above it the
                   sine/exponential (spectral) form.  Each converges fastest
                   on its own side, as with theta functions.
    """

    term_tol: float = 1e-14
    max_terms: int = 1000
    switch_ratio: float = 0.5

    def __post_init__(self) -> None:
        if not (self.term_tol > 0.0):
            raise InvalidDomainError(f"term_tol must be > 0, got {self.term_tol}")
        if self.max_terms < 1:
            raise InvalidDomainError(f"max_terms must be >= 1, got {self.max_terms}")
        if not (self.switch_ratio > 0.0):
            raise InvalidDomainError(f"switch_ratio must be > 0, got {self.switch_ratio}")


DEFAULT_SERIES = SeriesConfig()
