#pragma once

// Ornstein-Uhlenbeck rescaling of the deviation process: R_s = S(t0 + sN)/sqrt(lambda N)
// is compared against dR = -R ds + sqrt(2) dB.

#include "arw/count_chain.hpp"
#include "arw/model.hpp"
#include "arw/rng.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace arw {

struct CriticalConstants {
    double rho_c = 0.0;
    double a = 0.0;
};

/// rho_c = lambda/(1+lambda), a = sqrt(lambda)/(1+lambda).
CriticalConstants critical_constants(double lambda);

struct RescaledSample {
    double s = 0.0;
    double r = 0.0;
};

struct RescaledPath {
    std::vector<RescaledSample> samples;
    /// |X_{t0} - rho_c N| / sqrt(N log N) outside [0.1, 10].
    bool off_window = false;
    /// Fewer than two samples in the requested range.
    bool empty_window = false;
};

/// Rescales the recorded points with t0 <= t <= t0 + horizon N. Throws DomainError
/// when no point has t = t0.
RescaledPath rescale_trajectory(const ModelParams& params, std::span<const TrajectoryPoint> path,
                                std::int64_t t0,
                                double horizon = std::numeric_limits<double>::infinity());

/// Euler-Maruyama path on [0, horizon]; element i is R at time i dt.
std::vector<double> ou_simulate(double horizon, double dt, Stream& rng, double r0 = 0.0);

struct OuMoments {
    double mean = 0.0;
    double variance = 0.0;
    double autocovariance = 0.0;  // at the requested lag
    std::int64_t samples = 0;
};

/// Time averages over `paths` independent stationary paths (R_0 ~ N(0, 1)), computed
/// without storing the paths.
OuMoments ou_moments(double horizon, double dt, double lag, std::int64_t paths, Stream& rng);

struct PassageTime {
    double time = 0.0;
    bool censored = false;
};

/// First time R <= level, censored at horizon. Requires dt <= 1e-2.
PassageTime ou_first_passage(double level, double horizon, double dt, Stream& rng, double r0 = 0.0);

struct PassageOptions {
    double epsilon = 0.3;
    /// Window coordinate (X - rho_c N)/sqrt(N log N) of the chain start; the chain
    /// starts on the critical line (S = 0). Must exceed the slow level's coefficient.
    double start_b = 0.0;  // 0 selects a + epsilon + 0.1
    double horizon = 50.0;
    double dt = 1e-3;
    unsigned threads = 0;
};

struct PassageComparison {
    double level = 0.0;  // M in rescaled units
    std::vector<PassageTime> chain;
    std::vector<PassageTime> ou;
    double ks_statistic = 0.0;  // censored samples sit at +infinity
    double median_chain = 0.0;  // +infinity when at least half are censored
    double median_ou = 0.0;
};

struct PassageDichotomy {
    PassageComparison slow;  // level (1+lambda)(a+eps) sqrt(log N)/sqrt(lambda), times multiplier
    PassageComparison fast;  // same with a - eps
    /// median(slow chain)/median(fast chain); when the slow median is censored the
    /// horizon is used and `ratio_is_lower_bound` is set.
    double median_ratio = 1.0;
    bool ratio_is_lower_bound = false;
};

/// Chain and OU first passages below -level (rescaled units), chain started on the
/// critical line at window coordinate options.start_b. Chain trial i uses stream
/// (derive_seed(seed, chain family), i), and likewise for the OU samples.
PassageComparison passage_compare(const ModelParams& params, double level, std::int64_t samples,
                                  std::uint64_t seed, const PassageOptions& options = {});

/// Chain and OU first passages below -M and -M' with M = multiplier (1+lambda)(a+eps)
/// sqrt(log N)/sqrt(lambda).
PassageDichotomy first_passage_compare(const ModelParams& params, double level_multiplier,
                                       std::int64_t samples, std::uint64_t seed,
                                       const PassageOptions& options = {});

/// Two-sample Kolmogorov-Smirnov statistic; censored values compare as +infinity.
double ks_statistic(std::span<const PassageTime> a, std::span<const PassageTime> b);
double median_time(std::span<const PassageTime> v);

struct RegressionOptions {
    std::int64_t trajectories = 200;
    std::int64_t steps_per_trajectory = 200'000;
    double start_b = 1.0;     // window coordinate of the starting X
    double r0_min = -4.0;     // starting R spread uniformly over [r0_min, r0_max]
    double r0_max = 8.0;
    double bin_width = 0.25;
    unsigned threads = 0;
};

struct DriftRegression {
    double drift_coefficient = 0.0;     // slope of E[dR | R]/ds against R
    double intercept = 0.0;
    double variance_coefficient = 0.0;  // Var[dR | R]/ds averaged over bins
    std::int64_t steps = 0;
    std::int64_t bins_used = 0;
};

/// Binned weighted regression of one-step increments of R along chain trajectories.
DriftRegression drift_regression(const ModelParams& params, const RegressionOptions& options,
                                 std::uint64_t seed);

}  // namespace arw
