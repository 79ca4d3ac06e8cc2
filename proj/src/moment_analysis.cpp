#include "arw/moment_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace arw {

namespace {

void require_active(const ModelParams& params, CountState state) {
    require_valid(params, state);
    if (state.absorbed()) throw DomainError("absorbed state has no increment law");
}

}  // namespace

double default_eps_n(const ModelParams& params) {
    const double n = params.n();
    return std::sqrt(std::max(std::log(n), 0.0) / n);
}

DeviationFrame::DeviationFrame(const ModelParams& p) : DeviationFrame(p, default_eps_n(p)) {}

DeviationFrame::DeviationFrame(const ModelParams& p, double eps) : params(p), eps_n(eps) {
    params.validate();
    if (!(eps_n > 0.0) || eps_n > 1.0 - params.rho_c()) {
        throw DomainError("eps_n must lie in (0, 1 - rho_c]");
    }
}

bool DeviationFrame::eps_in_bracket() const {
    const double lo = default_eps_n(params);
    const double hi = std::min(1.0 - params.rho_c(), 0.01);
    return lo <= eps_n && eps_n <= hi;
}

bool DeviationFrame::in_lower_band(CountState s) const {
    const double v = s_of(s);
    const double n = params.n();
    return -2.0 * eps_n * n <= v && v <= -eps_n * n;
}

double drift_exact(const ModelParams& params, CountState state) {
    require_active(params, state);
    const double lam = params.lambda;
    const double n = params.n();
    const double x = static_cast<double>(state.x);
    const double c = (n + 1.0) / n;
    const double s = static_cast<double>(state.y) - ((1.0 + lam) * x - lam * n);
    return -lam / (1.0 + lam) + (lam / (1.0 + lam)) * c / (n + 2.0 - x) +
           (1.0 / (1.0 + lam)) * c * (-s + lam * (n - x)) / (n + 3.0 - x);
}

double drift_enumerated(const ModelParams& params, CountState state) {
    const double lam = params.lambda;
    return increment_law(params, state).expect([lam](const StepOutcome& o) { return o.ds(lam); });
}

double second_moment_exact(const ModelParams& params, CountState state) {
    require_active(params, state);
    const double lam = params.lambda;
    const double n = params.n();
    const double x = static_cast<double>(state.x);
    const double y = static_cast<double>(state.y);
    const double c = (n + 1.0) / n;
    const double free = x - y;  // equals -S + lambda (N - x)
    const double w = 1.0 / (1.0 + lam);
    return lam * w + lam * lam * w * c / (n + 2.0 - x) +
           2.0 * lam * w * c * free / ((n + 2.0 - x) * (n + 3.0 - x)) +
           2.0 * w * c * free * (n + 3.0 - y) / ((n + 3.0 - x) * (n + 4.0 - x)) -
           w * c * free / (n + 3.0 - x);
}

double second_moment_enumerated(const ModelParams& params, CountState state) {
    const double lam = params.lambda;
    return increment_law(params, state).expect([lam](const StepOutcome& o) {
        const double d = o.ds(lam);
        return d * d;
    });
}

double mgf_exact(const ModelParams& params, CountState state, double theta) {
    if (!(std::abs(theta) <= 0.5)) throw DomainError("mgf_exact requires |theta| <= 0.5");
    const IncrementLaw law = increment_law(params, state);
    return law.expect([theta](const StepOutcome& o) {
        return std::exp(-theta * static_cast<double>(o.dy()));
    });
}

std::optional<double> mgf_expansion(const ModelParams& params, CountState state, double theta) {
    require_active(params, state);
    if (state.x == params.n_sites) return std::nullopt;
    const double lam = params.lambda;
    const double n = params.n();
    const double x = static_cast<double>(state.x);
    const double y = static_cast<double>(state.y);
    const double w = 1.0 / (1.0 + lam);
    const double r = (x - y) / (n - x);
    const double first = lam * w - w * r;
    const double second = 0.5 * lam * w - 0.5 * w * r + w * (x - y) * (n - y) / ((n - x) * (n - x));
    return 1.0 + theta * first + theta * theta * second;
}

double supermartingale_margin(const ModelParams& params, CountState state, double h, double eps_n) {
    const double lam = params.lambda;
    const double rate = h * eps_n;
    const IncrementLaw law = increment_law(params, state);
    // 1 - E[e^{-rate dS}] = -E[expm1(-rate dS)], exact at h = 0.
    return -law.expect([lam, rate](const StepOutcome& o) { return std::expm1(-rate * o.ds(lam)); });
}

void DeviationTracker::observe(std::int64_t t, CountState s) {
    const double v = frame_.s_of(s);
    if (v < extrema_.min_s) {
        extrema_.min_s = v;
        extrema_.argmin_t = t;
    }
    if (v > extrema_.max_s) {
        extrema_.max_s = v;
        extrema_.argmax_t = t;
    }
}

DeviationExtrema deviation_scan(std::span<const TrajectoryPoint> path, const DeviationFrame& frame) {
    if (path.empty()) throw DomainError("deviation_scan: empty trajectory");
    DeviationTracker tracker(frame);
    for (const auto& p : path) tracker.observe(p.t, {p.x, p.y});
    return tracker.result();
}

}  // namespace arw
