"""First-exit discretization of the Wiener process.

A Wiener path is tracked by an approximation that refreshes whenever the
process drifts a threshold ``eta`` away from the last recorded value.  This
package provides the analytic machinery for that scheme (absorbed-process
densities, the first-exit time law, renewal densities and the analytic
tracking-error density), a reproducible Monte Carlo engine, reference
distributions with a Wasserstein-1 metric, and an experiment CLI that
produces the standard verification figures as CSV/SVG.

The normalized tracking error converges in distribution, as ``eta`` shrinks,
to the triangular law with density ``(1 - |z|)^+``; the acceptance tests in
``tests/test_acceptance.py`` verify that limit both analytically and by
simulation.
"""

__version__ = "0.1.0"

from .density import (
    ATOM,
    absorbed_density,
    absorbed_density_images,
    absorbed_density_spectral,
    integrate_density_over_time,
    small_time_density_integral,
)
from .distributions import (
    DensityGrid,
    EmpiricalSample,
    GridLaw,
    KdeResult,
    ScaledNormalLaw,
    TriangularLaw,
    kde,
    scaled_normal_pdf,
    triangular_cdf,
    triangular_pdf,
    triangular_quantile,
    wasserstein1,
)
from .errors import (
    ConfigError,
    DegenerateSampleError,
    ExitgridError,
    HorizonTooShortError,
    InvalidDomainError,
    NoConvergenceError,
    ToleranceNotMetError,
    UnboundedIntegralError,
    UnstableStepError,
)
from .first_passage import FirstPassageLaw
from .params import DEFAULT_SERIES, ModelParams, SeriesConfig
from .path_sim import (
    DiscretizationTrace,
    PathConfig,
    SimulationBatch,
    collect_errors,
    discretize,
    generate_path,
    simulate_batch,
)
from .renewal import (
    ErrorDensity,
    RenewalGrid,
    TriangularLimitReport,
    convolution_term,
    solve_renewal_density,
    tracking_error_density,
    triangular_limit_check,
)

__all__ = [
    "ATOM",
    "ConfigError",
    "DEFAULT_SERIES",
    "DegenerateSampleError",
    "DensityGrid",
    "DiscretizationTrace",
    "EmpiricalSample",
    "ErrorDensity",
    "ExitgridError",
    "FirstPassageLaw",
    "GridLaw",
    "HorizonTooShortError",
    "InvalidDomainError",
    "KdeResult",
    "ModelParams",
    "NoConvergenceError",
    "PathConfig",
    "RenewalGrid",
    "ScaledNormalLaw",
    "SeriesConfig",
    "SimulationBatch",
    "ToleranceNotMetError",
    "TriangularLaw",
    "TriangularLimitReport",
    "UnboundedIntegralError",
    "UnstableStepError",
    "absorbed_density",
    "absorbed_density_images",
    "absorbed_density_spectral",
    "collect_errors",
    "convolution_term",
    "discretize",
    "generate_path",
    "integrate_density_over_time",
    "kde",
    "scaled_normal_pdf",
    "simulate_batch",
    "small_time_density_integral",
    "solve_renewal_density",
    "tracking_error_density",
    "triangular_cdf",
    "triangular_limit_check",
    "triangular_pdf",
    "triangular_quantile",
    "wasserstein1",
    "__version__",
]
