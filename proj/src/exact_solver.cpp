#include "arw/exact_solver.hpp"

#include "arw/count_chain.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace arw {

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A is column diagonally dominant and lower Hessenberg. Eliminating the single
// superdiagonal entry of each column from the bottom up leaves a lower
// triangular system; dominance makes pivoting unnecessary.
Vector solve_lower_hessenberg(Matrix a, Vector b) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index j = n - 1; j > 0; --j) {
        const double f = a(j - 1, j) / a(j, j);
        if (f == 0.0) continue;
        a.row(j - 1).head(j + 1) -= f * a.row(j).head(j + 1);
        b(j - 1) -= f * b(j);
    }
    Vector m(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double acc = i > 0 ? a.row(i).head(i).dot(m.head(i)) : 0.0;
        m(i) = (b(i) - acc) / a(i, i);
    }
    return m;
}

void require_pair(std::int64_t n, std::int64_t m) {
    if (n < 1 || m <= n) {
        throw DomainError("sum identity requires 1 <= n < m, got n=" + std::to_string(n) +
                          ", m=" + std::to_string(m));
    }
}

// prod_{i<l} (n-i)/(m-i) for l = 1..n, passed to f(l, term).
template <class F>
void for_each_product(std::int64_t n, std::int64_t m, F&& f) {
    double prod = 1.0;
    for (std::int64_t l = 1; l <= n; ++l) {
        prod *= static_cast<double>(n - (l - 1)) / static_cast<double>(m - (l - 1));
        f(l, prod);
    }
}

}  // namespace

double StationaryDist::total() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

double StationaryDist::mean() const {
    double acc = 0.0;
    for (std::size_t k = 0; k < mass.size(); ++k) acc += static_cast<double>(k) * mass[k];
    return acc;
}

double StationaryDist::sd() const {
    const double mu = mean();
    double acc = 0.0;
    for (std::size_t k = 0; k < mass.size(); ++k) {
        const double d = static_cast<double>(k) - mu;
        acc += d * d * mass[k];
    }
    return std::sqrt(acc);
}

std::int64_t StationaryDist::argmax() const {
    return static_cast<std::int64_t>(std::max_element(mass.begin(), mass.end()) - mass.begin());
}

double StationaryDist::mass_below(double threshold) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < mass.size() && static_cast<double>(k) < threshold; ++k) acc += mass[k];
    return acc;
}

StationaryDist stationary_exact(const ModelParams& params, const ExactSolverOptions& options) {
    params.validate();
    const std::int64_t n = params.n_sites;
    if (n > options.max_sites) {
        throw DomainError("stationary_exact: N=" + std::to_string(n) + " exceeds the cap " +
                          std::to_string(options.max_sites));
    }

    StationaryDist out;
    out.mass.assign(static_cast<std::size_t>(n + 1), 0.0);

    // inflow[y-1] is the mass entering slice x at (x, y).
    Vector inflow = Vector::Zero(n);
    inflow(n - 1) = 1.0;

    for (std::int64_t x = n; x >= 1; --x) {
        const Eigen::Index size = x;
        Matrix a = Matrix::Identity(size, size);
        Vector next = Vector::Zero(std::max<std::int64_t>(x - 1, 0));
        std::vector<IncrementLaw> laws;
        laws.reserve(static_cast<std::size_t>(x));

        // a = I - P^T restricted to the slice; column y-1 holds moves out of (x, y).
        for (std::int64_t y = 1; y <= x; ++y) {
            laws.push_back(increment_law(params, {x, y}));
            const auto& law = laws.back();
            const Eigen::Index col = y - 1;
            if (y >= 2) a(y - 2, col) -= law.sleep;
            for (std::int64_t k = 0; k <= law.max_woken(); ++k) {
                a(y + k - 1, col) -= law.settle[static_cast<std::size_t>(k)];
            }
        }

        const Vector b = inflow.head(size);
        Vector m;
        if (options.solver == SliceSolver::Dense) {
            m = a.partialPivLu().solve(b);
        } else {
            m = solve_lower_hessenberg(a, b);
        }

        const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
        const double residual = (a * m - b).lpNorm<Eigen::Infinity>() / scale;
        out.max_residual = std::max(out.max_residual, residual);
        if (!(residual <= options.residual_tolerance)) {
            throw std::runtime_error("stationary_exact: slice x=" + std::to_string(x) +
                                     " residual " + std::to_string(residual) +
                                     " exceeds tolerance");
        }

        // Absorption at y = 0 inside the slice (Sleep from y = 1) and Exit mass.
        out.mass[static_cast<std::size_t>(x)] += m(0) * laws[0].sleep;
        for (std::int64_t y = 1; y <= x; ++y) {
            const auto& law = laws[static_cast<std::size_t>(y - 1)];
            const double occ = m(y - 1);
            for (std::int64_t k = 0; k <= law.max_woken(); ++k) {
                const double flow = occ * law.exit[static_cast<std::size_t>(k)];
                const std::int64_t y_next = y - 1 + k;
                if (y_next == 0) {
                    out.mass[static_cast<std::size_t>(x - 1)] += flow;
                } else {
                    next(y_next - 1) += flow;
                }
            }
        }
        inflow = Vector::Zero(n);
        inflow.head(next.size()) = next;
    }
    return out;
}

double IdentityCheck::error() const {
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

IdentityCheck sum_identity_first(std::int64_t n, std::int64_t m) {
    require_pair(n, m);
    IdentityCheck c;
    for_each_product(n, m, [&](std::int64_t, double term) { c.lhs += term; });
    c.rhs = static_cast<double>(n) / static_cast<double>(m - n + 1);
    return c;
}

IdentityCheck sum_identity_second(std::int64_t n, std::int64_t m) {
    require_pair(n, m);
    IdentityCheck c;
    for_each_product(n, m, [&](std::int64_t l, double term) { c.lhs += static_cast<double>(l) * term; });
    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(m);
    c.rhs = dn * (dm + 1.0) / ((dm - dn + 1.0) * (dm - dn + 2.0));
    return c;
}

ExpIdentityCheck sum_identity_exp(std::int64_t n, std::int64_t m, double theta) {
    require_pair(n, m);
    if (!std::isfinite(theta) ||
        std::exp(-theta) * static_cast<double>(n) / static_cast<double>(m) > 0.9) {
        throw DomainError("sum_identity_exp requires e^{-theta} n/m <= 0.9");
    }
    ExpIdentityCheck c;
    for_each_product(n, m, [&](std::int64_t l, double term) {
        c.lhs += std::exp(-theta * static_cast<double>(l)) * term;
    });
    const double first = sum_identity_first(n, m).rhs;
    const double second = sum_identity_second(n, m).rhs;
    c.first_order_rhs = first - theta * second;
    c.residual = c.lhs - c.first_order_rhs;
    return c;
}

}  // namespace arw
