#pragma once

// Stationary law of the driven chain as the hitting distribution of X at the
// first time Y = 0, starting from (N, N), computed slice by slice.

#include "arw/model.hpp"

#include <cstdint>
#include <vector>

namespace arw {

/// Probability vector over final particle counts 0..N.
struct StationaryDist {
    std::vector<double> mass;
    /// Largest scaled slice residual seen during the solve.
    double max_residual = 0.0;

    std::int64_t n_sites() const { return static_cast<std::int64_t>(mass.size()) - 1; }
    double total() const;
    double mean() const;
    double sd() const;
    std::int64_t argmax() const;
    /// P[count < threshold].
    double mass_below(double threshold) const;
};

enum class SliceSolver : std::uint8_t {
    Dense,      // LU with partial pivoting
    Hessenberg  // O(n^2) elimination; only dY = -1 moves down
};

struct ExactSolverOptions {
    std::int64_t max_sites = 300;
    SliceSolver solver = SliceSolver::Dense;
    double residual_tolerance = 1e-8;
};

/// Throws DomainError above the site cap and std::runtime_error when a slice
/// residual exceeds the tolerance.
StationaryDist stationary_exact(const ModelParams& params, const ExactSolverOptions& options = {});

struct IdentityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double error() const;
};

/// sum_{l=1}^n prod_{i<l} (n-i)/(m-i) against n/(m-n+1). Requires 1 <= n < m.
IdentityCheck sum_identity_first(std::int64_t n, std::int64_t m);

/// sum_{l=1}^n l prod_{i<l} (n-i)/(m-i) against n(m+1)/((m-n+1)(m-n+2)).
IdentityCheck sum_identity_second(std::int64_t n, std::int64_t m);

struct ExpIdentityCheck {
    double lhs = 0.0;
    double first_order_rhs = 0.0;
    double residual = 0.0;
};

/// sum_{l=1}^n e^{-l theta} prod_{i<l} (n-i)/(m-i) against the first-order
/// expansion in theta. Requires e^{-theta} n/m <= 0.9.
ExpIdentityCheck sum_identity_exp(std::int64_t n, std::int64_t m, double theta);

}  // namespace arw
