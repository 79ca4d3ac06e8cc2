#include "arw/exact_solver.hpp"

#include "oracles.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <doctest.h>

#include <cmath>

using namespace arw;
using boost::multiprecision::cpp_rational;

TEST_CASE("N = 1 closed form") {
    for (double lam : {0.2, 1.0, 7.5}) {
        const StationaryDist d = stationary_exact(ModelParams(1, lam));
        REQUIRE(d.mass.size() == 2);
        CHECK(std::abs(d.mass[0] - 1.0 / (1.0 + lam)) <= 1e-15);
        CHECK(std::abs(d.mass[1] - lam / (1.0 + lam)) <= 1e-15);
    }
}

TEST_CASE("slice solve agrees with a global dense solve") {
    for (double lam : {0.5, 1.0, 3.0}) {
        for (std::int64_t n = 1; n <= 12; ++n) {
            const ModelParams p(n, lam);
            const auto ref = oracle::stationary_dense(p);
            for (SliceSolver s : {SliceSolver::Dense, SliceSolver::Hessenberg}) {
                ExactSolverOptions opt;
                opt.solver = s;
                const StationaryDist d = stationary_exact(p, opt);
                for (std::size_t k = 0; k < ref.size(); ++k) {
                    CHECK(std::abs(d.mass[k] - ref[k]) <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("normalisation, moments and argmax") {
    ExactSolverOptions opt;
    opt.solver = SliceSolver::Hessenberg;
    const StationaryDist d = stationary_exact(ModelParams(50, 1.0), opt);
    CHECK(std::abs(d.total() - 1.0) <= 1e-10);
    for (double m : d.mass) CHECK(m >= -1e-15);
    const double w = std::sqrt(50.0 * std::log(50.0));
    CHECK(d.argmax() >= 25);
    CHECK(static_cast<double>(d.argmax()) <= 25.0 + 3.0 * w);
    CHECK(d.mean() > 25.0);
    CHECK(d.sd() > 0.0);
    CHECK(d.mass_below(0.0) == 0.0);
    CHECK(d.mass_below(51.0) == doctest::Approx(d.total()));
    CHECK(d.n_sites() == 50);
}

TEST_CASE("stationary_exact errors") {
    CHECK_THROWS_AS(stationary_exact(ModelParams(301, 1.0)), DomainError);
    ExactSolverOptions opt;
    opt.max_sites = 10;
    CHECK_THROWS_AS(stationary_exact(ModelParams(11, 1.0), opt), DomainError);
    opt.max_sites = 300;
    opt.residual_tolerance = -1.0;
    CHECK_THROWS_AS(stationary_exact(ModelParams(5, 1.0), opt), std::runtime_error);
}

TEST_CASE("sum identities in rational arithmetic") {
    const std::int64_t n = 30, m = 100;
    cpp_rational first = 0, second = 0, prod = 1;
    for (std::int64_t l = 1; l <= n; ++l) {
        prod *= cpp_rational(n - (l - 1), m - (l - 1));
        first += prod;
        second += prod * l;
    }
    CHECK(first == cpp_rational(n, m - n + 1));
    CHECK(second == cpp_rational(n * (m + 1), (m - n + 1) * (m - n + 2)));

    const IdentityCheck a = sum_identity_first(n, m);
    const IdentityCheck b = sum_identity_second(n, m);
    CHECK(std::abs(a.lhs - static_cast<double>(first)) <= 1e-14);
    CHECK(std::abs(b.lhs - static_cast<double>(second)) <= 1e-13);
    CHECK(a.error() <= 1e-14);
    CHECK(b.error() <= 1e-13);
}

TEST_CASE("sum identity edge cases") {
    CHECK(sum_identity_first(1, 2).lhs == 0.5);
    CHECK(sum_identity_first(1, 2).rhs == 0.5);
    CHECK_THROWS_AS(sum_identity_first(0, 5), DomainError);
    CHECK_THROWS_AS(sum_identity_first(5, 5), DomainError);
    CHECK_THROWS_AS(sum_identity_second(6, 5), DomainError);
}

TEST_CASE("exponential sum, first order") {
    const ExpIdentityCheck c = sum_identity_exp(2, 3, 0.1);
    // l = 1: 2/3; l = 2: (2/3)(1/2).
    CHECK(c.lhs == doctest::Approx(std::exp(-0.1) * 2.0 / 3.0 + std::exp(-0.2) / 3.0).epsilon(1e-14));
    CHECK(std::abs(c.residual) <= 0.05);
    const ExpIdentityCheck zero = sum_identity_exp(50, 200, 0.0);
    CHECK(std::abs(zero.residual) <= 1e-14);
    CHECK_THROWS_AS(sum_identity_exp(10, 11, 0.0), DomainError);
}
