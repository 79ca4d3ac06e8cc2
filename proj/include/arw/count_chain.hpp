#pragma once

// Reduced particle-count chain (X, Y): exact one-step law and samplers.
//
// From a state (x, y) with y >= 1 a uniformly chosen active particle either
// falls asleep or walks on the complete graph, waking every sleeper it visits,
// until it settles on an empty vertex or leaves through the boundary. Only the
// number k of woken sleepers and the way the walk ends matter for (X, Y).

#include "arw/model.hpp"
#include "arw/rng.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace arw {

enum class OutcomeKind : std::uint8_t { Sleep, Settle, Exit };

/// One transition of the count chain.
///   Sleep      : dx = 0,  dy = -1
///   Settle(k)  : dx = 0,  dy = k
///   Exit(k)    : dx = -1, dy = k - 1
struct StepOutcome {
    OutcomeKind kind = OutcomeKind::Sleep;
    std::int64_t woken = 0;

    static constexpr StepOutcome sleep() { return {OutcomeKind::Sleep, 0}; }
    static constexpr StepOutcome settle(std::int64_t k) { return {OutcomeKind::Settle, k}; }
    static constexpr StepOutcome exit(std::int64_t k) { return {OutcomeKind::Exit, k}; }

    constexpr std::int64_t dx() const { return kind == OutcomeKind::Exit ? -1 : 0; }
    constexpr std::int64_t dy() const {
        switch (kind) {
            case OutcomeKind::Sleep: return -1;
            case OutcomeKind::Settle: return woken;
            case OutcomeKind::Exit: return woken - 1;
        }
        return 0;
    }
    /// Increment of S = Y - l(X) with l(x) = (1 + lambda) x - lambda N.
    double ds(double lambda) const { return static_cast<double>(dy()) - (1.0 + lambda) * static_cast<double>(dx()); }

    CountState apply(CountState s) const { return {s.x + dx(), s.y + dy()}; }

    std::string to_string() const;

    constexpr auto operator<=>(const StepOutcome&) const = default;
};

/// Branch selector of the tail probabilities: 0 = walk settles, -1 = walk exits.
enum class Branch : int { Settle = 0, Exit = -1 };

/// Exact one-step outcome distribution from a non-absorbed state.
///
/// `settle[k]` and `exit[k]` hold the probabilities of Settle(k) and Exit(k)
/// for k = 0..x-y.
struct IncrementLaw {
    CountState origin;
    double sleep = 0.0;
    std::vector<double> settle;
    std::vector<double> exit;

    std::int64_t max_woken() const { return static_cast<std::int64_t>(settle.size()) - 1; }
    double probability(const StepOutcome& o) const;
    double total() const;

    /// All outcomes in sampling order: Sleep, Exit(0), Settle(0), Exit(1), Settle(1), ...
    std::vector<std::pair<StepOutcome, double>> entries() const;

    /// Law of dY indexed from -1: element j is P[dY = j - 1].
    std::vector<double> delta_y_pmf() const;
    /// Tail of dY indexed from -1: element j is P[dY >= j - 1].
    std::vector<double> delta_y_tail() const;

    /// E[f(outcome)] by exact summation over the finite support.
    template <class F>
    double expect(F&& f) const {
        double acc = sleep * f(StepOutcome::sleep());
        for (std::size_t k = 0; k < settle.size(); ++k) {
            const auto kk = static_cast<std::int64_t>(k);
            acc += exit[k] * f(StepOutcome::exit(kk));
            acc += settle[k] * f(StepOutcome::settle(kk));
        }
        return acc;
    }
};

/// Tail probability Pi_k of the chosen branch: P[at least k sleepers woken and the
/// walk ends on that branch]. The Settle branch at k = 0 carries the correction
/// for the first jump, which cannot return to the origin.
/// Admissible k: 0 <= k <= x - y + 1 (the last value returns 0).
double pi_tail(const ModelParams& params, CountState state, Branch branch, std::int64_t k);

/// Full outcome distribution; requires y >= 1.
IncrementLaw increment_law(const ModelParams& params, CountState state);

/// Stateless inverse-CDF draw from the law at `state`; requires y >= 1.
std::pair<CountState, StepOutcome> sample_step(const ModelParams& params, CountState state,
                                               Stream& rng);

/// Sampler with the per-parameter constants hoisted out of the step loop.
class CountChainSampler {
public:
    explicit CountChainSampler(const ModelParams& params);

    StepOutcome draw(CountState state, Stream& rng) const;
    const ModelParams& params() const { return params_; }

private:
    ModelParams params_;
    double n_ = 1.0;
    double sleep_p_ = 0.5;
    double move_scale_ = 0.5;  // (1/(1+lambda)) (N+1)/N
};

struct TrajectoryPoint {
    std::int64_t t = 0;
    std::int64_t x = 0;
    std::int64_t y = 0;
};

struct RunOptions {
    /// Record every `record_stride`-th state (and always the endpoints); 0 records
    /// only the endpoints.
    std::int64_t record_stride = 1;
    /// Levels rho for which tau_rho = inf{t : X_t <= rho N} is reported.
    std::vector<double> rho_levels;
};

struct Trajectory {
    std::vector<TrajectoryPoint> path;
    std::int64_t steps = 0;
    CountState final_state;
    bool truncated = false;
    /// T+ = inf{t : Y_t = 0}; empty when the run was truncated first.
    std::optional<std::int64_t> absorption_time;
    std::vector<std::optional<std::int64_t>> first_passage;
};

/// Runs the chain until Y = 0 or `max_steps` steps. Truncation sets the flag and
/// leaves `absorption_time` empty.
Trajectory run_until_absorbed(const ModelParams& params, CountState start, Stream& rng,
                              std::int64_t max_steps, const RunOptions& options = {});

/// Streaming variant: calls `observer(t, state)` at t = 0 and after every step.
/// The observer may return `false` to stop early. Returns the number of steps taken.
template <class Observer>
std::int64_t run_chain(const CountChainSampler& sampler, CountState start, Stream& rng,
                       std::int64_t max_steps, Observer&& observer) {
    require_valid(sampler.params(), start);
    CountState s = start;
    if (!observer(std::int64_t{0}, s)) return 0;
    std::int64_t t = 0;
    while (s.y > 0 && t < max_steps) {
        s = sampler.draw(s, rng).apply(s);
        ++t;
        if (!observer(t, s)) break;
    }
    return t;
}

/// True when the dY law of `hi` dominates that of `lo`: P_hi[dY >= j] >= P_lo[dY >= j]
/// for every j, up to 1e-12.
bool stochastic_dominance_check(const IncrementLaw& hi, const IncrementLaw& lo);

}  // namespace arw
