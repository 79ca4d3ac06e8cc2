#include "arw/scaling_limit.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace arw;

TEST_CASE("critical constants") {
    const CriticalConstants one = critical_constants(1.0);
    CHECK(one.rho_c == 0.5);
    CHECK(one.a == 0.5);
    const CriticalConstants four = critical_constants(4.0);
    CHECK(four.rho_c == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(four.a == doctest::Approx(0.4).epsilon(1e-15));
    const CriticalConstants tiny = critical_constants(1e-12);
    CHECK(tiny.rho_c == doctest::Approx(1e-12).epsilon(1e-9));
    CHECK(tiny.a == doctest::Approx(1e-6).epsilon(1e-9));
    CHECK_THROWS_AS(critical_constants(0.0), DomainError);
    CHECK_THROWS_AS(critical_constants(-1.0), DomainError);
    CHECK_THROWS_AS(critical_constants(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("critical constant identities") {
    for (double lam : {0.01, 0.5, 1.0, 3.0, 100.0}) {
        const CriticalConstants c = critical_constants(lam);
        CHECK(c.a * c.a * (1.0 + lam) * (1.0 + lam) == doctest::Approx(lam).epsilon(1e-14));
        CHECK(c.rho_c * (1.0 + lam) == doctest::Approx(lam).epsilon(1e-14));
    }
}

TEST_CASE("rescaling a recorded trajectory") {
    const ModelParams p(10000, 1.0);
    const std::int64_t x0 = 5000 + static_cast<std::int64_t>(p.window_scale());
    const std::int64_t y0 = 2 * x0 - 10000;
    const std::vector<TrajectoryPoint> path{
        {0, x0, y0}, {5000, x0, y0 + 100}, {10000, x0 - 1, y0 - 2}, {30000, x0, y0}};
    const RescaledPath r = rescale_trajectory(p, path, 0, 1.5);
    REQUIRE(r.samples.size() == 3);
    CHECK_FALSE(r.off_window);
    CHECK_FALSE(r.empty_window);
    CHECK(r.samples[0].r == 0.0);
    CHECK(r.samples[1].s == doctest::Approx(0.5));
    CHECK(r.samples[1].r == doctest::Approx(1.0));
    // S changes by -2 + 2 = 0 when X drops by one and Y by two.
    CHECK(r.samples[2].r == doctest::Approx(0.0));

    const RescaledPath late = rescale_trajectory(p, path, 30000);
    CHECK(late.empty_window);
    const std::vector<TrajectoryPoint> centred{{0, 5000, 0}, {1, 5000, 1}};
    CHECK(rescale_trajectory(p, centred, 0).off_window);
    CHECK_THROWS_AS(rescale_trajectory(p, path, 7), DomainError);
}

TEST_CASE("OU simulation") {
    Stream rng(1);
    const auto path = ou_simulate(1.0, 1e-2, rng, 3.0);
    REQUIRE(path.size() == 101);
    CHECK(path.front() == 3.0);
    CHECK_THROWS_AS(ou_simulate(1.0, 0.1, rng), DomainError);
    CHECK_THROWS_AS(ou_simulate(1.0, 0.0, rng), DomainError);
}

TEST_CASE("OU moments") {
    Stream rng(2);
    const OuMoments m = ou_moments(200.0, 1e-3, 1.0, 20, rng);
    CHECK(std::abs(m.mean) < 0.05);
    CHECK(std::abs(m.variance - 1.0) < 0.1);
    CHECK(std::abs(m.autocovariance - std::exp(-1.0)) < 0.1);
    CHECK(m.samples > 0);
}

TEST_CASE("OU first passage") {
    Stream rng(3);
    const PassageTime immediate = ou_first_passage(0.0, 10.0, 1e-3, rng, 0.0);
    CHECK(immediate.time == 0.0);
    CHECK_FALSE(immediate.censored);
    const PassageTime never = ou_first_passage(-50.0, 1.0, 1e-3, rng);
    CHECK(never.censored);
    CHECK(never.time == doctest::Approx(1.0));
    int hits = 0;
    for (int i = 0; i < 200; ++i) hits += !ou_first_passage(-1.0, 20.0, 1e-2, rng).censored;
    CHECK(hits > 190);
}

TEST_CASE("KS statistic and median") {
    const std::vector<PassageTime> a{{1.0, false}, {2.0, false}, {3.0, false}};
    const std::vector<PassageTime> b{{1.0, false}, {2.0, false}, {3.0, false}};
    const std::vector<PassageTime> c{{10.0, true}, {10.0, true}, {10.0, true}};
    CHECK(ks_statistic(a, b) == 0.0);
    CHECK(ks_statistic(a, c) == 1.0);
    CHECK(median_time(a) == 2.0);
    CHECK(std::isinf(median_time(c)));
    CHECK_THROWS_AS(ks_statistic(a, {}), DomainError);
    CHECK_THROWS_AS(median_time({}), DomainError);
}

TEST_CASE("passage comparison at level zero") {
    const ModelParams p(2000, 1.0);
    PassageOptions o;
    o.horizon = 5.0;
    o.dt = 1e-2;
    o.threads = 2;
    const PassageDichotomy d = first_passage_compare(p, 0.0, 100, 11, o);
    CHECK(d.median_ratio == 1.0);
    CHECK(d.slow.median_chain == 0.0);
    CHECK(d.fast.median_ou == 0.0);
    CHECK_THROWS_AS(first_passage_compare(p, 1.0, 99, 11, o), DomainError);
    CHECK_THROWS_AS(first_passage_compare(p, -1.0, 100, 11, o), DomainError);
    o.epsilon = 0.6;
    CHECK_THROWS_AS(first_passage_compare(p, 1.0, 100, 11, o), DomainError);
}

TEST_CASE("passage comparison does not depend on the thread count") {
    const ModelParams p(2000, 1.0);
    PassageOptions o;
    o.horizon = 5.0;
    o.dt = 1e-2;
    o.start_b = 1.0;
    o.threads = 1;
    const PassageComparison one = passage_compare(p, 1.0, 40, 5, o);
    o.threads = 3;
    const PassageComparison three = passage_compare(p, 1.0, 40, 5, o);
    REQUIRE(one.chain.size() == three.chain.size());
    for (std::size_t i = 0; i < one.chain.size(); ++i) {
        CHECK(one.chain[i].time == three.chain[i].time);
        CHECK(one.ou[i].time == three.ou[i].time);
    }
    CHECK(one.ks_statistic == three.ks_statistic);
    CHECK_THROWS_AS(passage_compare(p, 100.0, 10, 5, o), DomainError);
    CHECK_THROWS_AS(passage_compare(p, 1.0, 0, 5, o), DomainError);
}

TEST_CASE("drift regression on a small system") {
    const ModelParams p(10000, 1.0);
    RegressionOptions o;
    o.trajectories = 20;
    o.steps_per_trajectory = 50000;
    o.threads = 1;
    const DriftRegression r = drift_regression(p, o, 3);
    CHECK(r.steps == 20 * 50000);
    CHECK(r.bins_used >= 2);
    CHECK(r.drift_coefficient < -0.5);
    CHECK(r.drift_coefficient > -1.5);
    CHECK(r.variance_coefficient > 1.5);
    CHECK(r.variance_coefficient < 2.5);
    o.trajectories = 0;
    CHECK_THROWS_AS(drift_regression(p, o, 3), DomainError);
}
