#include "arw/moment_analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace arw;

TEST_CASE("drift and second moment at N = 2, (1, 1)") {
    // Sleep: dS = -1 (1/2). Settle(0): dS = 0 (1/4). Exit(0): dS = +1 (1/4).
    const ModelParams p(2, 1.0);
    CHECK(drift_exact(p, {1, 1}) == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(second_moment_exact(p, {1, 1}) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("closed forms agree with enumeration") {
    for (double lam : {0.3, 1.0, 5.0}) {
        for (std::int64_t n : {1, 3, 10, 40}) {
            const ModelParams p(n, lam);
            for (std::int64_t x = 1; x <= n; ++x) {
                for (std::int64_t y = 1; y <= x; ++y) {
                    CHECK(std::abs(drift_exact(p, {x, y}) - drift_enumerated(p, {x, y})) <= 1e-12);
                    CHECK(std::abs(second_moment_exact(p, {x, y}) - second_moment_enumerated(p, {x, y})) <=
                          1e-12 * std::max(1.0, second_moment_enumerated(p, {x, y})));
                }
            }
        }
    }
}

TEST_CASE("drift is affine in S with negative slope") {
    const ModelParams p(1000, 2.0);
    const std::int64_t x = 700;
    const double d1 = drift_exact(p, {x, 100});
    const double d2 = drift_exact(p, {x, 101});
    const double d3 = drift_exact(p, {x, 102});
    CHECK(d2 - d1 < 0.0);
    CHECK((d3 - d2) == doctest::Approx(d2 - d1).epsilon(1e-9));
    const double slope = -(1.0 / 3.0) * (1001.0 / 1000.0) / (1000.0 + 3.0 - 700.0);
    CHECK((d2 - d1) == doctest::Approx(slope).epsilon(1e-9));
}

TEST_CASE("drift on the critical line is O(1/N)") {
    for (std::int64_t n : {1000, 10000, 100000}) {
        const ModelParams p(n, 1.0);
        const auto x = static_cast<std::int64_t>(std::llround(p.rho_c() * n + p.window_scale()));
        const auto y = static_cast<std::int64_t>(std::llround((1.0 + p.lambda) * x - p.lambda * n));
        CHECK(std::abs(drift_exact(p, {x, y})) * n < 10.0);
    }
}

TEST_CASE("state requirements") {
    const ModelParams p(5, 1.0);
    CHECK_THROWS_AS(drift_exact(p, {3, 0}), DomainError);
    CHECK_THROWS_AS(second_moment_exact(p, {3, 0}), DomainError);
    CHECK_THROWS_AS(drift_exact(p, {6, 1}), DomainError);
    CHECK_THROWS_AS(mgf_exact(p, {3, 1}, 0.6), DomainError);
    CHECK_THROWS_AS(mgf_exact(p, {3, 0}, 0.1), DomainError);
    CHECK_THROWS_AS(mgf_expansion(p, {3, 0}, 0.1), DomainError);
}

TEST_CASE("mgf basics") {
    const ModelParams p(20, 1.0);
    CHECK(mgf_exact(p, {10, 4}, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(*mgf_expansion(p, {10, 4}, 0.0) == 1.0);
    // Convexity in theta.
    for (double t : {-0.3, -0.1, 0.0, 0.1, 0.3}) {
        const double h = 0.05;
        const double lhs = mgf_exact(p, {10, 4}, t - h) + mgf_exact(p, {10, 4}, t + h);
        CHECK(lhs >= 2.0 * mgf_exact(p, {10, 4}, t) - 1e-14);
    }
    CHECK_FALSE(mgf_expansion(p, {20, 4}, 0.1).has_value());
}

TEST_CASE("mgf expansion error is third order") {
    const ModelParams p(10000, 1.0);
    const std::int64_t x = 5300;
    const std::int64_t y = 2 * x - 10000;
    const double e1 = std::abs(mgf_exact(p, {x, y}, 0.1) - *mgf_expansion(p, {x, y}, 0.1));
    const double e2 = std::abs(mgf_exact(p, {x, y}, 0.05) - *mgf_expansion(p, {x, y}, 0.05));
    CHECK(e1 / e2 >= 6.0);
    CHECK(e1 / e2 <= 10.0);
}

TEST_CASE("supermartingale margin") {
    const ModelParams p(1000, 1.0);
    CHECK(supermartingale_margin(p, {600, 150}, 0.0, 0.1) == 0.0);
    // Continuity in h.
    const double m1 = supermartingale_margin(p, {600, 150}, 1e-6, 0.1);
    CHECK(std::abs(m1) < 1e-5);
    // Deep in the lower band the drift is positive, so small tilts give a positive margin.
    const DeviationFrame f(p, 0.05);
    const CountState s{600, 130};
    CHECK(f.in_lower_band(s));
    CHECK(supermartingale_margin(p, s, 0.01, f.eps_n) >= 0.0);
}

TEST_CASE("deviation frame") {
    const ModelParams p(1000, 1.0);
    CHECK(default_eps_n(p) == doctest::Approx(std::sqrt(std::log(1000.0) / 1000.0)));
    CHECK_THROWS_AS(DeviationFrame(p, 0.0), DomainError);
    CHECK_THROWS_AS(DeviationFrame(p, 0.6), DomainError);
    const DeviationFrame f(p);
    CHECK_FALSE(f.eps_in_bracket());
    CHECK(f.s_of({500, 0}) == doctest::Approx(0.0));
    CHECK(f.s_of({600, 200}) == doctest::Approx(0.0));
    const DeviationFrame big(ModelParams(1'000'000, 1.0), 0.005);
    CHECK(big.eps_in_bracket());
}

TEST_CASE("deviation scan") {
    const DeviationFrame f(ModelParams(10, 1.0), 0.1);
    const std::vector<TrajectoryPoint> path{{0, 10, 10}, {1, 10, 9}, {2, 10, 9}, {3, 9, 9}, {4, 9, 7}};
    const DeviationExtrema e = deviation_scan(path, f);
    // S = y - 2x + 10: 0, -1, -1, 1, -1.
    CHECK(e.min_s == -1.0);
    CHECK(e.argmin_t == 1);
    CHECK(e.max_s == 1.0);
    CHECK(e.argmax_t == 3);
    const std::vector<TrajectoryPoint> one{{5, 4, 2}};
    const DeviationExtrema s = deviation_scan(one, f);
    CHECK(s.min_s == s.max_s);
    CHECK(s.argmin_t == 5);
    CHECK_THROWS_AS(deviation_scan(std::vector<TrajectoryPoint>{}, f), DomainError);
}
