"""Activated random walk on the complete graph: count chain, exact stationary law,
moment checks, coarse graining and the OU scaling comparison."""

from ._arw import (
    ConfigError,
    DomainError,
    ModelParams,
    TruncationError,
    band_parameters,
    config_hash,
    critical_constants,
    drift_enumerated,
    drift_exact,
    driven_chain_counts,
    hitting_probability,
    hitting_probability_linear,
    increment_law,
    mgf_exact,
    mgf_expansion,
    ou_simulate,
    pi_tail,
    run_stationary_sampling,
    run_suite,
    run_until_absorbed,
    second_moment_exact,
    stationary_exact,
    suite_names,
    sum_identity_first,
    sum_identity_second,
    supermartingale_margin,
)

__all__ = [name for name in dir() if not name.startswith("_")]
