#pragma once

// Named groups of numerical checks. The `suite` subcommand and the acceptance
// runner both call these, so every threshold lives in one place.

#include "arw/experiments.hpp"

#include <cstdint>
#include <vector>

namespace arw::checks {

struct Context {
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

/// Normalisation of the one-step law, the two exact sum identities, the
/// first-order exponential sum, and closed-form drift / second moment.
std::vector<Check> identities();

struct OracleScale {
    std::int64_t max_sites = 6;
    std::int64_t eta_samples = 1'000'000;  // per state
    std::int64_t driven_sites = 20;
    std::int64_t driven_burn_in = 10'000;
    std::int64_t driven_additions = 1'000'000;
    std::int64_t abelian_samples = 100'000;
    int abelian_thinning = 10;
};

/// Site-level simulators against the exact count-chain law and stationary law.
std::vector<Check> oracles(const Context& ctx, const OracleScale& scale = {});

/// Exact stationary law: N = 1 closed form and normalisation up to N = 300.
std::vector<Check> exact_solver();

/// Counts within rho_c N +- A sqrt(N log N) and the supercritical shift.
std::vector<Check> window(const WindowReport& report);

/// Fraction of runs from (N, N) with T+ > delta (1 + lambda) N^2.
std::vector<Check> stabilization_time(const Context& ctx, std::int64_t n_sites = 1000,
                                      std::int64_t runs = 200, double delta = 0.9);

/// Drift sign structure, MGF expansion, window variance, supermartingale margins,
/// lower deviations along trajectories.
std::vector<Check> drift(const Context& ctx);

/// Tilt roots, interval-exit ratios, resistance formulas, large-jump bound.
std::vector<Check> coarse_grain(const Context& ctx);

struct ScalingScale {
    std::int64_t passage_samples = 200;
    double passage_horizon = 50.0;
    std::int64_t ou_paths = 100;
    double ou_horizon = 1000.0;
    std::int64_t trend_samples = 2000;
};

/// Rescaled drift / variance, OU moments, first-passage dichotomy.
std::vector<Check> scaling(const Context& ctx, const ScalingScale& scale = {});

/// Convenience for building checks.
Check within(std::string name, double measured, std::optional<double> lower, std::optional<double> upper);

}  // namespace arw::checks
