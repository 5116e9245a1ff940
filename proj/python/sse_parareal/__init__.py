"""Parareal exponential theta-scheme for the damped stochastic Schroedinger equation."""

from ._core import (
    ConfigError,
    ContractionViolation,
    Divergence,
    Model,
    NoisePath,
    NonConvergence,
    TimeGrid,
    __version__,
    delta_t_star,
    eigenvalue,
    eta,
    eval_nonlinearity,
    exact_moments,
    h_norm,
    linear_error_bound,
    mk_norm_bound,
    nonlinear_factor,
    normalize_config,
    coarse_step,
    propagate_fine,
    region_raster,
    run_parareal,
    run_study,
    s_theta,
    semigroup_apply,
    stable_function,
    theta_scheme_moments,
    uniform_contraction_check,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
