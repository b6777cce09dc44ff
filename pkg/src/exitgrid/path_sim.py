"""Monte Carlo engine for the first-exit discretization scheme.

Paths of ``X_t = sigma * W_t`` are generated on a fine uniform grid, one
deterministic random substream per path index, so results are bit-identical
for a given (seed, path index) regardless of how paths are distributed over
workers.  Each path is generated, discretized for every requested threshold,
reduced to its per-time tracking errors and renewal statistics, and dropped;
full path matrices are never held across the batch.

The crossing convention is grid-first-touch: a detection is recorded at the
first grid index where the path has moved at least ``eta`` from the current
anchor, and the new anchor is the path value at that index.  This keeps the
normalized error inside [-1, 1] at every grid time.  An optional ``snap``
mode instead moves the anchor by exactly ``+/- eta`` (for sensitivity runs);
there the error can exceed the band by the grid overshoot.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .distributions import EmpiricalSample
from .errors import InvalidDomainError
from .params import ModelParams

__all__ = [
    "DiscretizationTrace",
    "PathConfig",
    "SimulationBatch",
    "collect_errors",
    "discretize",
    "generate_path",
    "simulate_batch",
]

_BLOCK = 4096


@dataclass(frozen=True)
class PathConfig:
    """Simulation protocol: horizon, grid resolution, batch size, seed, thresholds."""

    t_end: float
    n_steps: int
    n_paths: int
    seed: int
    etas: tuple[float, ...] = (0.5,)

    def __post_init__(self) -> None:
        object.__setattr__(self, "etas", tuple(float(e) for e in np.atleast_1d(self.etas)))
        if self.t_end <= 0.0:
            raise InvalidDomainError("t_end must be > 0")
        if self.n_steps < 1 or self.n_paths < 1:
            raise InvalidDomainError("n_steps and n_paths must be >= 1")
        if self.seed < 0:
            raise InvalidDomainError("seed must be a non-negative integer")
        if len(self.etas) == 0 or any(e <= 0.0 for e in self.etas):
            raise InvalidDomainError("etas must be non-empty and positive")

    @property
    def dt(self) -> float:
        return self.t_end / self.n_steps

    def time_index(self, t: float) -> int:
        """Grid index of an evaluation time; the time must sit on the grid."""
        idx = int(round(t / self.dt))
        if idx < 0 or idx > self.n_steps or abs(idx * self.dt - t) > 1e-9 * max(self.t_end, 1.0):
            raise InvalidDomainError(f"t={t} is not on the simulation grid (dt={self.dt})")
        return idx


@dataclass(frozen=True)
class DiscretizationTrace:
    """Detections of one path for one threshold."""

    crossing_indices: np.ndarray
    anchor_values: np.ndarray
    terminal_error: float
    renewal_count: int


def generate_path(cfg: PathConfig, sigma: float, path_index: int) -> np.ndarray:
    """One Wiener path on the grid, from the substream keyed by (seed, path index).

    ``sigma = 0`` is allowed here (degenerate all-zero path) even though the
    analytic modules require a positive diffusion coefficient.
    """
    if sigma < 0.0:
        raise InvalidDomainError("sigma must be >= 0")
    if path_index < 0:
        raise InvalidDomainError("path_index must be >= 0")
    rng = np.random.default_rng([cfg.seed, path_index])
    steps = rng.standard_normal(cfg.n_steps) * (sigma * math.sqrt(cfg.dt))
    x = np.empty(cfg.n_steps + 1)
    x[0] = 0.0
    np.cumsum(steps, out=x[1:])
    return x


def _scan_path(x: np.ndarray, eta: float, snap: bool):
    """Sequential first-touch scan; returns crossings, anchors and statistics."""
    n = x.size
    anchor = 0.0
    idx = 0
    crossings: list[int] = []
    anchors: list[float] = []
    ups = 0
    downs = 0
    max_overshoot = 0.0
    while True:
        j = idx + 1
        found = -1
        while j < n:
            hi = min(j + _BLOCK, n)
            mask = np.abs(x[j:hi] - anchor) >= eta
            k = int(mask.argmax())
            if mask[k]:
                found = j + k
                break
            j = hi
        if found < 0:
            break
        move = float(x[found]) - anchor
        over = abs(move) - eta
        if over > max_overshoot:
            max_overshoot = over
        if move > 0.0:
            ups += 1
        else:
            downs += 1
        anchor = anchor + math.copysign(eta, move) if snap else float(x[found])
        crossings.append(found)
        anchors.append(anchor)
        idx = found
    return crossings, anchors, ups, downs, max_overshoot


def discretize(path: np.ndarray, eta: float, snap: bool = False) -> DiscretizationTrace:
    """Apply the first-exit rule to a simulated path for one threshold."""
    if eta <= 0.0:
        raise InvalidDomainError("eta must be > 0")
    path = np.asarray(path, dtype=float)
    crossings, anchors, _, _, _ = _scan_path(path, eta, snap)
    last_anchor = anchors[-1] if anchors else 0.0
    return DiscretizationTrace(
        crossing_indices=np.asarray(crossings, dtype=np.int64),
        anchor_values=np.asarray(anchors, dtype=float),
        terminal_error=float(path[-1]) - last_anchor,
        renewal_count=len(crossings),
    )


@dataclass(frozen=True)
class SimulationBatch:
    """Reduced batch output; arrays are indexed (path, time, threshold)."""

    cfg: PathConfig
    sigma: float
    t_eval: tuple[float, ...]
    snap: bool
    errors: np.ndarray  # normalized tracking errors Z/eta, (n_paths, n_t, n_eta)
    renewal_counts: np.ndarray  # detections up to t_end, (n_paths, n_eta)
    first_crossing: np.ndarray  # time of first detection or nan, (n_paths, n_eta)
    up_counts: np.ndarray  # (n_paths, n_eta)
    down_counts: np.ndarray  # (n_paths, n_eta)
    max_overshoot: np.ndarray  # (n_paths, n_eta)

    def _eta_index(self, eta: float) -> int:
        try:
            return self.cfg.etas.index(float(eta))
        except ValueError:
            raise InvalidDomainError(f"eta={eta} not in batch thresholds {self.cfg.etas}")

    def _t_index(self, t: float) -> int:
        try:
            return self.t_eval.index(float(t))
        except ValueError:
            raise InvalidDomainError(f"t={t} not in batch evaluation times {self.t_eval}")

    def sample(self, eta: float, t: float) -> EmpiricalSample:
        """Sorted normalized errors for one (threshold, time) pair."""
        return EmpiricalSample(self.errors[:, self._t_index(t), self._eta_index(eta)])

    def variance(self, eta: float, t: float) -> float:
        col = self.errors[:, self._t_index(t), self._eta_index(eta)]
        return float(np.var(col, ddof=1))


def _run_chunk(args) -> tuple:
    cfg, sigma, t_idx, snap, start, stop = args
    n = stop - start
    n_t = len(t_idx)
    n_eta = len(cfg.etas)
    errors = np.empty((n, n_t, n_eta))
    counts = np.zeros((n, n_eta), dtype=np.int64)
    first = np.full((n, n_eta), np.nan)
    ups = np.zeros((n, n_eta), dtype=np.int64)
    downs = np.zeros((n, n_eta), dtype=np.int64)
    over = np.zeros((n, n_eta))
    t_idx_arr = np.asarray(t_idx, dtype=np.int64)
    for row, pidx in enumerate(range(start, stop)):
        x = generate_path(cfg, sigma, pidx)
        xt = x[t_idx_arr]
        xmax = float(np.max(np.abs(x)))
        for e, eta in enumerate(cfg.etas):
            if eta > xmax:  # the band is never left; skip the scan
                errors[row, :, e] = xt / eta
                continue
            crossings, anchors, u, d, mo = _scan_path(x, eta, snap)
            counts[row, e] = len(crossings)
            ups[row, e] = u
            downs[row, e] = d
            over[row, e] = mo
            if crossings:
                ci = np.asarray(crossings, dtype=np.int64)
                av = np.asarray(anchors)
                first[row, e] = crossings[0] * cfg.dt
                pos = np.searchsorted(ci, t_idx_arr, side="right") - 1
                anchor_at = np.where(pos >= 0, av[np.maximum(pos, 0)], 0.0)
                errors[row, :, e] = (xt - anchor_at) / eta
            else:
                errors[row, :, e] = xt / eta
    return errors, counts, first, ups, downs, over


def simulate_batch(
    cfg: PathConfig,
    sigma: float,
    t_eval,
    workers: int = 1,
    snap: bool = False,
) -> SimulationBatch:
    """Run the full batch and reduce it to per-(eta, t) error samples.

    Results are invariant to ``workers``: every path owns a substream keyed
    by its index and chunks are reassembled in path order.
    """
    t_eval = tuple(float(t) for t in np.atleast_1d(t_eval))
    t_idx = tuple(cfg.time_index(t) for t in t_eval)
    if workers < 1:
        raise InvalidDomainError("workers must be >= 1")

    bounds = np.linspace(0, cfg.n_paths, min(workers, cfg.n_paths) + 1).astype(int)
    jobs = [
        (cfg, sigma, t_idx, snap, int(a), int(b))
        for a, b in zip(bounds[:-1], bounds[1:])
        if b > a
    ]
    if workers == 1 or len(jobs) == 1:
        parts = [_run_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
            parts = list(pool.map(_run_chunk, jobs))

    errors, counts, first, ups, downs, over = (
        np.concatenate([p[i] for p in parts], axis=0) for i in range(6)
    )
    return SimulationBatch(
        cfg=cfg,
        sigma=sigma,
        t_eval=t_eval,
        snap=snap,
        errors=errors,
        renewal_counts=counts,
        first_crossing=first,
        up_counts=ups,
        down_counts=downs,
        max_overshoot=over,
    )


def collect_errors(
    cfg: PathConfig,
    params: ModelParams,
    t_eval,
    workers: int = 1,
    snap: bool = False,
) -> dict[float, EmpiricalSample]:
    """Normalized tracking-error samples for ``params.eta`` at each time."""
    run_cfg = PathConfig(
        t_end=cfg.t_end,
        n_steps=cfg.n_steps,
        n_paths=cfg.n_paths,
        seed=cfg.seed,
        etas=(params.eta,),
    )
    batch = simulate_batch(run_cfg, params.sigma, t_eval, workers=workers, snap=snap)
    return {t: batch.sample(params.eta, t) for t in batch.t_eval}
