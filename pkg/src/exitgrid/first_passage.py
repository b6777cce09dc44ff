"""Law of the first exit time ``tau = inf{t > 0 : |X_t| = eta}``.

Survival function, density, mean, quantiles and exact-in-distribution
sampling for the time the process first leaves the band ``(-eta, eta)``.
As with the absorbed density, every quantity has a Gaussian-image form
(fast for small ``sigma^2 t / eta^2``) and a spectral form (fast for large),
switched at ``cfg.switch_ratio``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import InvalidDomainError, NoConvergenceError, ToleranceNotMetError
from .params import DEFAULT_SERIES, ModelParams, SeriesConfig

__all__ = ["FirstPassageLaw"]


@dataclass(frozen=True)
class FirstPassageLaw:
    """Distribution of the first two-sided exit time from a centred band."""

    params: ModelParams
    cfg: SeriesConfig = DEFAULT_SERIES

    # -- survival ---------------------------------------------------------

    def survival(self, t) -> float | np.ndarray:
        """P(tau > t), clamped to [0, 1].  Accepts scalars or arrays."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        if np.any(t < 0.0):
            raise InvalidDomainError("survival needs t >= 0")
        tt = np.atleast_1d(t)
        out = np.empty(tt.shape)

        ratio = self.params.sigma**2 / self.params.eta**2
        small = tt * ratio < self.cfg.switch_ratio
        if np.any(small):
            out[small] = self._survival_images(tt[small])
        if np.any(~small):
            out[~small] = self._survival_spectral(tt[~small])
        np.clip(out, 0.0, 1.0, out=out)
        return float(out[0]) if scalar else out.reshape(t.shape)

    def _survival_images(self, t: np.ndarray) -> np.ndarray:
        eta, sigma = self.params.eta, self.params.sigma
        out = np.ones(t.shape)
        pos = t > 0.0
        if not np.any(pos):
            return out
        s = sigma * np.sqrt(t[pos])
        smax = float(np.max(s))

        def band(center: float) -> np.ndarray:
            # integral of the Gaussian image at `center` over [-eta, eta]
            return ndtr((eta - center) / s) - ndtr((-eta - center) / s)

        acc = band(0.0) - band(2.0 * eta)
        k = 1
        while True:
            bound = 4.0 * ndtr(-(4.0 * k - 3.0) * eta / smax)
            if bound < self.cfg.term_tol:
                break
            if k > self.cfg.max_terms:
                raise NoConvergenceError("survival image series hit its term cap")
            acc += band(4.0 * k * eta) - band(2.0 * eta - 4.0 * k * eta)
            acc += band(-4.0 * k * eta) - band(2.0 * eta + 4.0 * k * eta)
            k += 1
        out[pos] = acc
        return out

    def _survival_spectral(self, t: np.ndarray) -> np.ndarray:
        eta, sigma = self.params.eta, self.params.sigma
        mu = (math.pi * sigma) ** 2 / (8.0 * eta**2)
        tmin = float(np.min(t))
        acc = np.zeros(t.shape)
        j = 0
        while True:
            k = 2 * j + 1
            bound = (4.0 / (math.pi * k)) * math.exp(-mu * k * k * tmin)
            if bound < self.cfg.term_tol:
                break
            if j > self.cfg.max_terms:
                raise NoConvergenceError("survival spectral series hit its term cap")
            acc += ((-1.0) ** j / k) * np.exp(-mu * k * k * t)
            j += 1
        return (4.0 / math.pi) * acc

    # -- density ----------------------------------------------------------

    def density(self, t) -> float | np.ndarray:
        """Density of tau at t > 0, clamped to >= 0."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        if np.any(t <= 0.0):
            raise InvalidDomainError("density needs t > 0")
        tt = np.atleast_1d(t)
        out = np.empty(tt.shape)

        ratio = self.params.sigma**2 / self.params.eta**2
        small = tt * ratio < self.cfg.switch_ratio
        if np.any(small):
            out[small] = self._density_images(tt[small])
        if np.any(~small):
            out[~small] = self._density_spectral(tt[~small])
        np.maximum(out, 0.0, out=out)
        return float(out[0]) if scalar else out.reshape(t.shape)

    def _density_images(self, t: np.ndarray) -> np.ndarray:
        eta, sigma = self.params.eta, self.params.sigma
        var = sigma * sigma * t
        # below this every exponential underflows to an exact zero while the
        # t^(-3/2) prefactor may overflow; the product is identically 0
        live = var >= eta * eta / 1500.0
        if not np.all(live):
            out = np.zeros(t.shape)
            if np.any(live):
                out[live] = self._density_images(t[live])
            return out
        pref = 1.0 / (2.0 * t * np.sqrt(2.0 * math.pi * var))
        prefmax = float(np.max(pref))
        varmax = float(np.max(var))

        def kterm(k: int) -> np.ndarray:
            a = (1.0 - 4.0 * k) * eta
            b = (1.0 + 4.0 * k) * eta
            c = (3.0 - 4.0 * k) * eta
            return (
                2.0 * a * np.exp(-(a * a) / (2.0 * var))
                + b * np.exp(-(b * b) / (2.0 * var))
                - c * np.exp(-(c * c) / (2.0 * var))
            )

        acc = kterm(0)
        k = 1
        while True:
            d = (4.0 * k - 3.0) * eta
            bound = 16.0 * (k + 1.0) * eta * prefmax * math.exp(-(d * d) / (2.0 * varmax))
            if bound < self.cfg.term_tol:
                break
            if 2 * k > self.cfg.max_terms:
                raise NoConvergenceError("exit-density image series hit its term cap")
            acc += kterm(k) + kterm(-k)
            k += 1
        return pref * acc

    def _density_spectral(self, t: np.ndarray) -> np.ndarray:
        eta, sigma = self.params.eta, self.params.sigma
        mu = (math.pi * sigma) ** 2 / (8.0 * eta**2)
        lead = math.pi * sigma**2 / (2.0 * eta**2)
        tmin = float(np.min(t))
        acc = np.zeros(t.shape)
        j = 0
        while True:
            k = 2 * j + 1
            bound = lead * k * math.exp(-mu * k * k * tmin)
            if bound < self.cfg.term_tol:
                break
            if j > self.cfg.max_terms:
                raise NoConvergenceError("exit-density spectral series hit its term cap")
            acc += ((-1.0) ** j * k) * np.exp(-mu * k * k * t)
            j += 1
        return lead * acc

    # -- moments / inverse ---------------------------------------------------

    def mean(self) -> float:
        """E[tau] = eta^2 / sigma^2 (closed form)."""
        return self.params.timescale

    def cdf(self, t) -> float | np.ndarray:
        return 1.0 - self.survival(t)

    def quantile(self, p, tol: float | None = None) -> float | np.ndarray:
        """Inverse CDF by bracketed bisection, to |t - t*| < tol.

        The bracket starts at [0, 8 eta^2/sigma^2] and the upper end grows
        geometrically until it covers p.
        """
        p = np.asarray(p, dtype=float)
        scalar = p.ndim == 0
        pp = np.atleast_1d(p)
        if np.any((pp <= 0.0) | (pp >= 1.0)):
            raise InvalidDomainError("quantile needs p in (0, 1)")
        if tol is None:
            tol = 1e-10 * self.params.timescale

        lo = np.zeros(pp.shape)
        hi = np.full(pp.shape, 8.0 * self.params.timescale)
        for _ in range(64):
            need = 1.0 - self.survival(hi) < pp
            if not np.any(need):
                break
            hi[need] *= 2.0
        else:
            raise ToleranceNotMetError("quantile bracket did not cover p")

        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = 1.0 - self.survival(mid) < pp
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if float(np.max(hi - lo)) < tol:
                break
        else:
            raise ToleranceNotMetError("quantile bisection hit its iteration cap")
        q = 0.5 * (lo + hi)
        return float(q[0]) if scalar else q.reshape(p.shape)

    def sample(self, rng: np.random.Generator, size=None, tol: float | None = None):
        """Inverse-CDF draws; exact in distribution up to the root tolerance."""
        u = rng.random(size)
        u = np.clip(u, 1e-300, 1.0 - 1e-16)
        return self.quantile(u, tol=tol)
