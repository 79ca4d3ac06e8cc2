#include "arw/count_chain.hpp"

#include <algorithm>
#include <cmath>

namespace arw {

namespace {

// Probabilities below this are dropped by the sampler.
constexpr double kNegligible = 1e-300;

// (1/(1+lambda)) (N+1)/N: probability of moving times the first-hit correction.
double move_scale(const ModelParams& p) {
    return (1.0 / (1.0 + p.lambda)) * (p.n() + 1.0) / p.n();
}

// P[Settle(0)] = scale (N+1-x)/(N+2-y) - 1/((1+lambda)N), written over a common
// denominator so that the cancellation at (x, y) = (N, 1) is exact.
double settle_without_wakes(const ModelParams& p, CountState s) {
    const std::int64_t n = p.n_sites;
    const std::int64_t num = (n + 1) * (n + 1 - s.x) - (n + 2 - s.y);
    return static_cast<double>(num) /
           ((1.0 + p.lambda) * p.n() * static_cast<double>(n + 2 - s.y));
}

}  // namespace

std::string StepOutcome::to_string() const {
    switch (kind) {
        case OutcomeKind::Sleep: return "Sleep";
        case OutcomeKind::Settle: return "Settle(" + std::to_string(woken) + ")";
        case OutcomeKind::Exit: return "Exit(" + std::to_string(woken) + ")";
    }
    return "?";
}

double pi_tail(const ModelParams& params, CountState state, Branch branch, std::int64_t k) {
    require_valid(params, state);
    const std::int64_t free = state.x - state.y;
    if (k < 0 || k > free + 1) {
        throw DomainError("pi_tail: k=" + std::to_string(k) + " outside [0, " +
                          std::to_string(free + 1) + "]");
    }
    if (k == free + 1) return 0.0;

    const double n = params.n();
    const double x = static_cast<double>(state.x);
    const double y = static_cast<double>(state.y);
    double prod = move_scale(params);
    for (std::int64_t i = 0; i < k; ++i) {
        const double di = static_cast<double>(i);
        prod *= (x - y - di) / (n + 2.0 - (y + di));
    }
    if (branch == Branch::Exit) {
        return prod / (n + 2.0 - x);
    }
    if (k == 0) {
        // scale (N+1-x)/(N+2-x) - 1/((1+lambda)N) over a common denominator.
        const auto num = params.n_sites * (params.n_sites + 1 - state.x) - 1;
        return static_cast<double>(num) / ((1.0 + params.lambda) * n * (n + 2.0 - x));
    }
    return prod * (n + 1.0 - x) / (n + 2.0 - x);
}

IncrementLaw increment_law(const ModelParams& params, CountState state) {
    require_valid(params, state);
    if (state.absorbed()) throw DomainError("absorbed state has no increment law");

    const double n = params.n();
    const double x = static_cast<double>(state.x);
    const double y = static_cast<double>(state.y);
    const std::int64_t free = state.x - state.y;

    IncrementLaw law;
    law.origin = state;
    law.sleep = params.sleep_probability();
    law.settle.resize(static_cast<std::size_t>(free + 1));
    law.exit.resize(static_cast<std::size_t>(free + 1));

    // prod_k = scale * prod_{i<k} (x-y-i)/(N+2-y-i); the walk stops after k wakes
    // with probability 1/(N+2-y-k) per remaining target, split between the
    // boundary (1 vertex) and the N+1-x empty vertices.
    double prod = move_scale(params);
    for (std::int64_t k = 0; k <= free; ++k) {
        const double dk = static_cast<double>(k);
        const double stop = prod / (n + 2.0 - y - dk);
        law.exit[static_cast<std::size_t>(k)] = stop;
        law.settle[static_cast<std::size_t>(k)] = stop * (n + 1.0 - x);
        prod *= (x - y - dk) / (n + 2.0 - (y + dk));
    }
    law.settle[0] = settle_without_wakes(params, state);
    return law;
}

double IncrementLaw::probability(const StepOutcome& o) const {
    if (o.kind == OutcomeKind::Sleep) return sleep;
    if (o.woken < 0 || o.woken > max_woken()) return 0.0;
    const auto k = static_cast<std::size_t>(o.woken);
    return o.kind == OutcomeKind::Settle ? settle[k] : exit[k];
}

double IncrementLaw::total() const {
    double acc = sleep;
    for (std::size_t k = 0; k < settle.size(); ++k) acc += settle[k] + exit[k];
    return acc;
}

std::vector<std::pair<StepOutcome, double>> IncrementLaw::entries() const {
    std::vector<std::pair<StepOutcome, double>> out;
    out.reserve(1 + 2 * settle.size());
    out.emplace_back(StepOutcome::sleep(), sleep);
    for (std::size_t k = 0; k < settle.size(); ++k) {
        const auto kk = static_cast<std::int64_t>(k);
        out.emplace_back(StepOutcome::exit(kk), exit[k]);
        out.emplace_back(StepOutcome::settle(kk), settle[k]);
    }
    return out;
}

std::vector<double> IncrementLaw::delta_y_pmf() const {
    // dY = -1 from Sleep and Exit(0); dY = k >= 0 from Settle(k) and Exit(k+1).
    std::vector<double> pmf(settle.size() + 1, 0.0);
    pmf[0] = sleep + exit[0];
    for (std::size_t k = 0; k < settle.size(); ++k) {
        pmf[k + 1] += settle[k];
        if (k + 1 < exit.size()) pmf[k + 1] += exit[k + 1];
    }
    return pmf;
}

std::vector<double> IncrementLaw::delta_y_tail() const {
    auto pmf = delta_y_pmf();
    std::vector<double> tail(pmf.size(), 0.0);
    double acc = 0.0;
    for (std::size_t j = pmf.size(); j-- > 0;) {
        acc += pmf[j];
        tail[j] = acc;
    }
    return tail;
}

CountChainSampler::CountChainSampler(const ModelParams& params)
    : params_(params),
      n_(params.n()),
      sleep_p_(params.sleep_probability()),
      move_scale_(move_scale(params)) {
    params_.validate();
}

StepOutcome CountChainSampler::draw(CountState state, Stream& rng) const {
    double u = rng.uniform();
    if (u < sleep_p_) return StepOutcome::sleep();
    u -= sleep_p_;

    const double x = static_cast<double>(state.x);
    const double y = static_cast<double>(state.y);
    const std::int64_t free = state.x - state.y;
    const double empty_targets = n_ + 1.0 - x;

    double prod = move_scale_;
    StepOutcome last = StepOutcome::exit(0);
    for (std::int64_t k = 0; k <= free; ++k) {
        const double dk = static_cast<double>(k);
        const double stop = prod / (n_ + 2.0 - y - dk);
        if (stop < kNegligible) break;
        if (u < stop) return StepOutcome::exit(k);
        u -= stop;
        const double settle = k == 0 ? settle_without_wakes(params_, state) : stop * empty_targets;
        if (settle > kNegligible) {
            if (u < settle) return StepOutcome::settle(k);
            u -= settle;
            last = StepOutcome::settle(k);
        } else {
            last = StepOutcome::exit(k);
        }
        prod *= (x - y - dk) / (n_ + 2.0 - (y + dk));
    }
    // Only reachable through rounding of the cumulative sum.
    return last;
}

std::pair<CountState, StepOutcome> sample_step(const ModelParams& params, CountState state,
                                               Stream& rng) {
    require_valid(params, state);
    if (state.absorbed()) throw DomainError("absorbed state has no increment law");
    const CountChainSampler sampler(params);
    const StepOutcome o = sampler.draw(state, rng);
    return {o.apply(state), o};
}

Trajectory run_until_absorbed(const ModelParams& params, CountState start, Stream& rng,
                              std::int64_t max_steps, const RunOptions& options) {
    const CountChainSampler sampler(params);
    Trajectory traj;
    traj.first_passage.assign(options.rho_levels.size(), std::nullopt);
    std::vector<double> thresholds;
    thresholds.reserve(options.rho_levels.size());
    for (double rho : options.rho_levels) thresholds.push_back(rho * params.n());

    CountState last = start;
    const std::int64_t stride = options.record_stride;
    const std::int64_t steps = run_chain(sampler, start, rng, max_steps, [&](std::int64_t t, CountState s) {
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
            if (!traj.first_passage[i] && static_cast<double>(s.x) <= thresholds[i]) {
                traj.first_passage[i] = t;
            }
        }
        if (t == 0 || (stride > 0 && t % stride == 0)) traj.path.push_back({t, s.x, s.y});
        last = s;
        return true;
    });
    if (traj.path.empty() || traj.path.back().t != steps) traj.path.push_back({steps, last.x, last.y});

    traj.steps = steps;
    traj.final_state = last;
    if (last.absorbed()) {
        traj.absorption_time = steps;
    } else {
        traj.truncated = true;
    }
    return traj;
}

bool stochastic_dominance_check(const IncrementLaw& hi, const IncrementLaw& lo) {
    constexpr double kTol = 1e-12;
    const auto th = hi.delta_y_tail();
    const auto tl = lo.delta_y_tail();
    const std::size_t n = std::max(th.size(), tl.size());
    for (std::size_t j = 0; j < n; ++j) {
        const double a = j < th.size() ? th[j] : 0.0;
        const double b = j < tl.size() ? tl[j] : 0.0;
        if (a < b - kTol) return false;
    }
    return true;
}

}  // namespace arw
