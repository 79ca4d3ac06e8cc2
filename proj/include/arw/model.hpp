#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace arw {

/// Raised when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a simulation hits its step cap before reaching the requested event.
class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Complete graph with `n_sites` internal vertices plus one absorbing boundary vertex,
/// sleep rate `lambda`.
struct ModelParams {
    std::int64_t n_sites = 1;
    double lambda = 1.0;

    ModelParams() = default;
    ModelParams(std::int64_t n, double lam) : n_sites(n), lambda(lam) { validate(); }

    void validate() const {
        if (n_sites < 1) {
            throw DomainError("n_sites must be >= 1, got " + std::to_string(n_sites));
        }
        if (!(lambda > 0.0) || !std::isfinite(lambda)) {
            throw DomainError("lambda must be positive and finite");
        }
    }

    double n() const { return static_cast<double>(n_sites); }

    /// Probability that a selected active particle falls asleep.
    double sleep_probability() const { return lambda / (1.0 + lambda); }

    /// Critical density lambda / (1 + lambda).
    double rho_c() const { return lambda / (1.0 + lambda); }

    /// Shift constant sqrt(lambda) / (1 + lambda).
    double shift_constant() const { return std::sqrt(lambda) / (1.0 + lambda); }

    /// sqrt(N log N), the scale of the supercritical shift.
    double window_scale() const { return std::sqrt(n() * std::log(n())); }
};

/// Total particle count x and active count y of the reduced chain.
struct CountState {
    std::int64_t x = 0;
    std::int64_t y = 0;

    bool absorbed() const { return y == 0; }
    bool operator==(const CountState&) const = default;
};

inline bool is_valid(const ModelParams& p, const CountState& s) {
    return 0 <= s.y && s.y <= s.x && s.x <= p.n_sites;
}

inline void require_valid(const ModelParams& p, const CountState& s) {
    if (!is_valid(p, s)) {
        throw DomainError("invalid count state (x=" + std::to_string(s.x) + ", y=" +
                          std::to_string(s.y) + ") for N=" + std::to_string(p.n_sites));
    }
}

}  // namespace arw
