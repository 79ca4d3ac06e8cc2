#include "arw/count_chain.hpp"
#include "arw/micro_dynamics.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace arw;

namespace {

MicroConfig from_pattern(const std::string& s) {
    MicroConfig c;
    for (char ch : s) {
        if (ch == 'A') c.sites.push_back(Site::with_active(1));
        else if (ch == 'S') c.sites.push_back(Site::sleeper());
        else c.sites.push_back(Site::empty());
    }
    return c;
}

}  // namespace

TEST_CASE("count projection") {
    CHECK(count_projection(from_pattern("ASE.")) == CountState{2, 1});
    CHECK(count_projection(MicroConfig::all_active(5)) == CountState{5, 5});
    CHECK(count_projection(MicroConfig::all_sleeping(3)) == CountState{3, 0});
    CHECK(count_projection(MicroConfig::all_empty(4)) == CountState{0, 0});
    MicroConfig multi = MicroConfig::all_empty(3);
    multi.sites[1] = Site::with_active(2);
    CHECK_THROWS_AS(count_projection(multi), DomainError);
    CHECK_FALSE(multi.single_occupancy());
    CHECK(multi.particle_count() == 2);
}

TEST_CASE("eta_step on a single vertex either sleeps or exits") {
    const ModelParams p(1, 3.0);
    Stream rng(1);
    int sleeps = 0;
    const int samples = 200000;
    for (int i = 0; i < samples; ++i) {
        auto [c, o] = eta_step(p, MicroConfig::all_active(1), rng);
        if (o == StepOutcome::sleep()) {
            ++sleeps;
            CHECK(c.sites[0] == Site::sleeper());
        } else {
            CHECK(o == StepOutcome::exit(0));
            CHECK(c.sites[0] == Site::empty());
        }
    }
    const double f = static_cast<double>(sleeps) / samples;
    CHECK(std::abs(f - 0.75) < 5.0 * std::sqrt(0.75 * 0.25 / samples));
}

TEST_CASE("eta_step outcome law matches the count chain at N=4, (3,2)") {
    const ModelParams p(4, 1.0);
    const MicroConfig start = from_pattern("AAS.");
    const IncrementLaw law = increment_law(p, {3, 2});
    std::map<StepOutcome, int> freq;
    Stream rng(2);
    const int samples = 400000;
    for (int i = 0; i < samples; ++i) {
        auto [c, o] = eta_step(p, start, rng);
        ++freq[o];
        CHECK(count_projection(c) == o.apply({3, 2}));
    }
    for (const auto& [o, prob] : law.entries()) {
        const double f = static_cast<double>(freq[o]) / samples;
        CHECK(std::abs(f - prob) <= 5.0 * std::sqrt(prob * (1 - prob) / samples) + 1e-12);
    }
}

TEST_CASE("eta_step preserves exchangeability from all-active") {
    const ModelParams p(6, 1.0);
    Stream rng(3);
    std::vector<int> empty_at(6, 0);
    const int samples = 300000;
    for (int i = 0; i < samples; ++i) {
        auto [c, o] = eta_step(p, MicroConfig::all_active(6), rng);
        for (int v = 0; v < 6; ++v) empty_at[v] += c.sites[v].kind() == SiteKind::Empty;
    }
    const double mean = (empty_at[0] + empty_at[1] + empty_at[2] + empty_at[3] + empty_at[4] + empty_at[5]) / 6.0;
    for (int v = 0; v < 6; ++v) {
        CHECK(std::abs(empty_at[v] - mean) < 5.0 * std::sqrt(mean));
    }
}

TEST_CASE("eta_step errors") {
    const ModelParams p(3, 1.0);
    Stream rng(4);
    CHECK_THROWS_AS(eta_step(p, MicroConfig::all_sleeping(3), rng), DomainError);
    CHECK_THROWS_AS(eta_step(p, MicroConfig::all_active(2), rng), DomainError);
    MicroConfig multi = MicroConfig::all_empty(3);
    multi.sites[0] = Site::with_active(2);
    CHECK_THROWS_AS(eta_step(p, multi, rng), DomainError);
}

TEST_CASE("stabilize_driven on a single vertex") {
    const ModelParams p(1, 1.0);
    Stream rng(5);
    for (int i = 0; i < 1000; ++i) {
        auto [c, updates] = stabilize_driven(p, MicroConfig::all_empty(1), 0, rng);
        CHECK(c.stable());
        CHECK(c.particle_count() <= 1);
        CHECK(updates >= 1);
    }
    for (int i = 0; i < 1000; ++i) {
        auto [c, updates] = stabilize_driven(p, MicroConfig::all_sleeping(1), 0, rng);
        CHECK(c.stable());
        CHECK(c.particle_count() <= 1);
    }
}

TEST_CASE("stabilize_driven errors") {
    const ModelParams p(3, 1.0);
    Stream rng(6);
    CHECK_THROWS_AS(stabilize_driven(p, MicroConfig::all_empty(3), 3, rng), DomainError);
    CHECK_THROWS_AS(stabilize_driven(p, MicroConfig::all_empty(3), -1, rng), DomainError);
    CHECK_THROWS_AS(stabilize_driven(p, MicroConfig::all_active(3), 0, rng), DomainError);
    CHECK_THROWS_AS(stabilize_driven(p, MicroConfig::all_empty(2), 0, rng), DomainError);
    StabilizeOptions tight;
    tight.max_updates = 1;
    MicroConfig lots = MicroConfig::all_empty(3);
    lots.sites[0] = Site::with_active(50);
    CHECK_THROWS_AS(stabilize_in_place(p, lots, rng, tight), TruncationError);
}

TEST_CASE("driven chain on one vertex is occupied with probability rho_c") {
    const ModelParams p(1, 2.0);
    Stream rng(7);
    const auto run = driven_chain_run(p, MicroConfig::all_empty(1), 100000, rng);
    REQUIRE(run.size() == 100000);
    double occupied = 0;
    for (const auto& s : run) occupied += static_cast<double>(s.particle_count);
    CHECK(std::abs(occupied / run.size() - p.rho_c()) < 0.01);
    CHECK(run.front().step_index == 0);
    CHECK(run.back().step_index == 99999);
}

TEST_CASE("driven chain with zero steps") {
    Stream rng(8);
    CHECK(driven_chain_run(ModelParams(4, 1.0), MicroConfig::all_empty(4), 0, rng).empty());
}

TEST_CASE("particle conservation during the driven chain") {
    const ModelParams p(30, 1.0);
    DrivenChain chain(p, MicroConfig::all_empty(30));
    Stream rng(9);
    std::int64_t prev = 0;
    for (int i = 0; i < 2000; ++i) {
        const DrivenSample s = chain.advance(rng);
        CHECK(s.particle_count <= prev + 1);
        CHECK(s.particle_count == chain.config().particle_count());
        CHECK(chain.config().stable());
        CHECK(chain.config().single_occupancy());
        prev = s.particle_count;
    }
    CHECK(chain.steps_taken() == 2000);
}

TEST_CASE("uniform and lowest-first selection both stabilize") {
    const ModelParams p(10, 0.5);
    for (SelectionRule rule : {SelectionRule::Uniform, SelectionRule::LowestSiteFirst}) {
        Stream rng(10);
        StabilizeOptions opt;
        opt.rule = rule;
        MicroConfig c = MicroConfig::all_active(10);
        stabilize_in_place(p, c, rng, opt);
        CHECK(c.stable());
        CHECK(c.particle_count() <= 10);
    }
}
