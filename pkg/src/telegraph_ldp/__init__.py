"""Damped and standard telegraph processes: exact laws, large-deviation rate
functions, level-crossing decay rates, and simulation-based checks."""

__version__ = "0.1.0"

from .density import LawOfD, density_p, interval_probability, point_masses, tau_star  # noqa: E402
from .params import ModelParams, Regime, classify_regime, load_params, validate_params  # noqa: E402
from .rates import (  # noqa: E402
    auxiliary_identity_residual,
    check_dls_hypotheses,
    decay_rate_closed,
    decay_rate_numeric,
    rate_ID,
    rate_IS,
)
from .rng import RngStream  # noqa: E402
from .sampler import (  # noqa: E402
    PathSkeleton,
    ProcessKind,
    position_at,
    running_max,
    sample_damped_path,
    sample_standard_path,
    switch_count,
)

__all__ = [
    "LawOfD", "ModelParams", "PathSkeleton", "ProcessKind", "Regime", "RngStream",
    "auxiliary_identity_residual", "check_dls_hypotheses", "classify_regime",
    "decay_rate_closed", "decay_rate_numeric", "density_p", "interval_probability",
    "load_params", "point_masses", "position_at", "rate_ID", "rate_IS", "running_max",
    "sample_damped_path", "sample_standard_path", "switch_count", "tau_star",
    "validate_params",
]
