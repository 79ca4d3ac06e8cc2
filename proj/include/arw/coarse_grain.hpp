#pragma once

// Coarse graining of the deviation process near the critical line.
//
// Bands I_k = ((k-1) L, (k+1) L) with L = N^{3/8}. Inside band k the increment
// of Z' = -Y is bounded by the i.i.d. law taken at the anchor (x, y_k*), whose
// interval-exit probabilities f_k drive a birth-and-death chain on band indices.

#include "arw/count_chain.hpp"
#include "arw/model.hpp"
#include "arw/rng.hpp"

#include <cstdint>
#include <vector>

namespace arw {

/// Law of an increment U taking values in {+1} u {0, -1, -2, ...}.
struct StepLaw {
    double up = 0.0;           // P[U = +1]
    std::vector<double> down;  // down[j] = P[U = -j]

    /// Law of -dY under `law`. Outcomes beyond the cumulative 1 - tail_cut quantile
    /// are dropped and their mass moved to the largest retained jump; tail_cut = 0
    /// keeps the full support.
    static StepLaw from_increment_law(const IncrementLaw& law, double tail_cut = 1e-15);
    /// +1 with probability p, -1 otherwise.
    static StepLaw plus_minus_one(double p);

    std::int64_t max_down() const { return static_cast<std::int64_t>(down.size()) - 1; }
    double total() const;
    double mean() const;
    /// E[exp(theta U)] - 1, accurate for small theta.
    double mgf_minus_one(double theta) const;
    std::int64_t sample(Stream& rng) const;
};

struct BandSpec {
    std::int64_t k = 0;
    bool barred = false;
    double width = 0.0;        // L = N^{3/8}
    double lower = 0.0;        // (k-1) L
    double upper = 0.0;        // (k+1) L
    double x_hat = 0.0;        // requested window coordinate of the anchor
    std::int64_t x_anchor = 0; // x (unbarred) or x_* = x - log^2 N (barred)
    double x_hat_anchor = 0.0; // (x_anchor - rho_c N) / sqrt(N log N)
    double z_star = 0.0;
    std::int64_t y_star = 0;
    double delta = 0.0;           // (x - y*)/(N - y*) - rho_c
    double delta_leading = 0.0;   // z*/((1+lambda)(N - y*))
    std::int64_t k_minus = 0;
    std::int64_t k_plus = 0;

    /// Integer exit thresholds: the walk leaves I_k at Z <= lattice_lower or Z >= lattice_upper.
    std::int64_t lattice_lower() const;
    std::int64_t lattice_upper() const;
};

/// floor(N^{1/8}).
std::int64_t band_k_minus(const ModelParams& params);
/// floor((1+lambda) x_hat N^{1/8} sqrt(log N)), with x_hat taken at the anchor.
std::int64_t band_k_plus(const ModelParams& params, double x_hat, bool barred = false);
/// Largest k <= K+ whose band has y* >= 1 (bands above it have no increment law).
std::int64_t band_top_usable(const ModelParams& params, double x_hat, bool barred = false);

/// Throws DomainError when k is outside [-K-, K+] or y* falls outside [0, x].
BandSpec band_parameters(const ModelParams& params, std::int64_t k, double x_hat, bool barred = false);

struct TiltRoot {
    double theta = 0.0;
    double prediction = 0.0;
    double residual = 0.0;    // phi(theta) - 1
    bool degenerate = false;  // zero drift: theta = 0 is the only root
};

/// Nonzero root of E[exp(theta U)] = 1 by bracketing from `prediction` and bisection.
/// Throws std::runtime_error when no sign change is found.
TiltRoot tilt_root(const StepLaw& law, double prediction);

/// Root for the band law at (x_anchor, y*), predicted by ((1+lambda)/lambda) delta_k.
TiltRoot theta_star(const ModelParams& params, const BandSpec& band);

/// P[walk reaches >= upper before <= lower] for every start lower+1..upper-1.
/// Throws DomainError for more than 10^6 lattice points.
std::vector<double> exit_probabilities(const StepLaw& law, std::int64_t lower, std::int64_t upper);
double exit_probability_exact(const StepLaw& law, std::int64_t lower, std::int64_t upper,
                              std::int64_t start);

enum class StartRule : std::uint8_t {
    Center,        // start at k L
    WindowMaximum  // max over [k L - 2M, k L + 2M] clipped to the interior
};

/// f_k for a band, using the band law truncated at 1 - 1e-15.
double band_exit_probability(const ModelParams& params, const BandSpec& band,
                             StartRule rule = StartRule::Center);

/// exp((k + 3/2)/(lambda N^{1/4})) (unbarred) or with k - 3/2 (barred).
double predicted_exit_ratio(const ModelParams& params, std::int64_t k, bool barred = false);

/// Monte Carlo mean of exp(theta (Z_T - Z_0)) for the walk stopped on leaving (lower, upper).
double optional_stopping_mean(const StepLaw& law, std::int64_t lower, std::int64_t upper,
                              std::int64_t start, double theta, std::int64_t runs, Stream& rng);

/// Birth-and-death chain on {lowest-1, ..., lowest+g.size()}; both ends absorb.
class BirthDeathChain {
public:
    BirthDeathChain(std::int64_t lowest, std::vector<double> g);
    /// Chain on {-K-, ..., K+} with constant up-probability.
    static BirthDeathChain uniform(std::int64_t k_minus, std::int64_t k_plus, double g);

    std::int64_t lowest() const { return lowest_; }
    std::int64_t highest() const { return lowest_ + static_cast<std::int64_t>(g_.size()) - 1; }
    std::int64_t bottom() const { return lowest_ - 1; }
    std::int64_t top() const { return highest() + 1; }
    double g(std::int64_t k) const;
    const std::vector<double>& up_probabilities() const { return g_; }

private:
    std::int64_t lowest_;
    std::vector<double> g_;
};

/// log r(k, k+1) for k = bottom .. highest, where r(k,k+1) = prod_{j=lowest}^{k} (1-g_j)/g_j.
std::vector<double> birth_death_log_resistance(const BirthDeathChain& chain);
std::vector<double> birth_death_resistance(const BirthDeathChain& chain);

/// P[hit top before bottom | start] as a ratio of effective resistances.
double hitting_probability(const BirthDeathChain& chain, std::int64_t start);
/// Same quantity from first-step analysis (tridiagonal solve).
double hitting_probability_linear(const BirthDeathChain& chain, std::int64_t start);

struct CoarseChain {
    std::vector<BandSpec> bands;
    std::vector<double> f;
    BirthDeathChain chain;
};

/// Bands -K-..top usable band with g_k = f_k.
CoarseChain build_coarse_chain(const ModelParams& params, double x_hat,
                               StartRule rule = StartRule::Center);

/// x_hat sqrt(log N) exp(-(1+lambda)^2 x_hat^2 log N / (2 lambda)).
double absorption_window_estimate(const ModelParams& params, double x_hat);

/// exp(-(1+lambda)^2 x_hat^2 log N / (2 lambda)); equals N^{-1/2} at x_hat = a.
double absorption_exponent_factor(const ModelParams& params, double x_hat);

/// Exact P[dY > m] at `state`.
double large_jump_tail(const ModelParams& params, CountState state, std::int64_t m);
/// C (x/(N+2))^{m+1} with C = 2/(1+lambda).
double large_jump_bound(const ModelParams& params, CountState state, std::int64_t m);

}  // namespace arw
