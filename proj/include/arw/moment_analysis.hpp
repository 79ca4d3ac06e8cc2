#pragma once

// Moments of the deviation process S = Y - l(X), l(x) = (1 + lambda) x - lambda N.

#include "arw/count_chain.hpp"
#include "arw/model.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <span>

namespace arw {

/// sqrt(log N / N); the lower end of the admissible range of eps_N.
double default_eps_n(const ModelParams& params);

struct DeviationFrame {
    ModelParams params;
    double eps_n = 0.0;

    /// Uses default_eps_n. Throws unless 0 < eps_n <= 1 - rho_c.
    explicit DeviationFrame(const ModelParams& p);
    DeviationFrame(const ModelParams& p, double eps);

    double ell_at(double x) const { return (1.0 + params.lambda) * x - params.lambda * params.n(); }
    double s_of(CountState s) const { return static_cast<double>(s.y) - ell_at(static_cast<double>(s.x)); }

    /// sqrt((log N)_+ / N) <= eps_n <= min(1 - rho_c, 1/100). The bracket is empty
    /// for N below roughly 1.2e5, so this is informational.
    bool eps_in_bracket() const;

    /// -2 eps_n N <= S <= -eps_n N.
    bool in_lower_band(CountState s) const;
};

/// E[dS | state] from the closed form; requires y >= 1.
double drift_exact(const ModelParams& params, CountState state);
/// E[dS | state] by summation over the exact increment law.
double drift_enumerated(const ModelParams& params, CountState state);

/// E[dS^2 | state] from the closed form; requires y >= 1.
double second_moment_exact(const ModelParams& params, CountState state);
double second_moment_enumerated(const ModelParams& params, CountState state);

/// E[exp(theta Z')] with Z' = -dY, by direct summation. Requires y >= 1, |theta| <= 0.5.
double mgf_exact(const ModelParams& params, CountState state, double theta);

/// Second-order expansion of mgf_exact in theta. Empty at x = N, where the
/// expansion is singular.
std::optional<double> mgf_expansion(const ModelParams& params, CountState state, double theta);

/// 1 - E[exp(-h eps_n dS)]; nonnegative means exp(-h eps_n S) is a local supermartingale.
double supermartingale_margin(const ModelParams& params, CountState state, double h, double eps_n);

struct DeviationExtrema {
    double min_s = std::numeric_limits<double>::infinity();
    double max_s = -std::numeric_limits<double>::infinity();
    std::int64_t argmin_t = -1;
    std::int64_t argmax_t = -1;
};

/// Streaming extrema of S; ties keep the earliest time.
class DeviationTracker {
public:
    explicit DeviationTracker(const DeviationFrame& frame) : frame_(frame) {}

    void observe(std::int64_t t, CountState s);
    const DeviationExtrema& result() const { return extrema_; }
    bool empty() const { return extrema_.argmin_t < 0; }

private:
    DeviationFrame frame_;
    DeviationExtrema extrema_;
};

/// Extrema of S over a recorded trajectory. Throws on an empty path.
DeviationExtrema deviation_scan(std::span<const TrajectoryPoint> path, const DeviationFrame& frame);

}  // namespace arw
