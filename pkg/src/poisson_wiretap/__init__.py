"""Secrecy capacity of the degraded discrete-time Poisson wiretap channel."""

__version__ = "0.1.0"

from .channel import (
    DEFAULT_POLICY,
    ChannelParams,
    DiscreteDistribution,
    IntensityConstraints,
    Side,
    TruncationPolicy,
    g_kernel,
    mi_densities,
    output_log_pmf,
    poisson_log_pmf,
    rates,
    truncation_index,
    weighted_objective,
)
from .errors import (
    BracketError,
    DomainError,
    SolverStallError,
    TruncationOverflowError,
    UndefinedMultiplierError,
    UnsupportedRegimeError,
    WrongRegimeError,
)
from .optimizer import (
    KktReport,
    SolveResult,
    SolverConfig,
    channel_capacity,
    estimate_gamma,
    kkt_verify,
    optimize_weights,
    refine_locations,
    solve,
)
from .region import RegionPoint, detect_tradeoff, trace_boundary
from .asymptotics import (
    AsymptoticReport,
    DegradationParams,
    avg_only_diff_gains_bounds,
    avg_only_equal_gains_slope,
    classify_regime,
    ct_secrecy_capacity,
    degradation_params,
    high_intensity_bound,
    low_intensity_linear_slope,
    low_intensity_quadratic,
    phi,
)
