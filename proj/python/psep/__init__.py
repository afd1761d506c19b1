"""Numerical mu-domains for the planar Skorokhod embedding problem."""

from ._core import (
    ConfigError,
    DomainError,
    GeometryError,
    Measure,
    QuantileStep,
    RunawayError,
    SingularityError,
    boundary_curve,
    fourier_coeffs,
    hardy_distance,
    hilbert_indicator,
    hilbert_phi_step,
    ks_statistic,
    lp_quantile_distance,
    lp_step_distance,
    parse_dist_spec,
    recenter,
    run,
    sample_exit_points,
    step_quantile,
    trace_hardy_distance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
