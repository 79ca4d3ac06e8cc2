#include "arw/checks.hpp"
#include "arw/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace arw;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("arw_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config validation") {
    ExperimentConfig c;
    CHECK_NOTHROW(c.validate());
    c.n_sites = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.lambda = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.mode = SamplingMode::Exact;
    c.n_sites = 301;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.n_sites = 300;
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config defaults") {
    ExperimentConfig c;
    c.n_sites = 50;
    c.lambda = 2.0;
    CHECK(c.effective_burn_in() == 500);
    CHECK(c.effective_max_steps() == 20 * 3 * 2500);
    c.max_steps = 7;
    CHECK(c.effective_max_steps() == 7);
}

TEST_CASE("config hash covers result-affecting fields only") {
    ExperimentConfig a, b;
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    b.threads = 7;
    CHECK(a.hash() == b.hash());
    b.seed = 2;
    CHECK(a.hash() != b.hash());
    b = a;
    b.lambda = 1.5;
    CHECK(a.hash() != b.hash());
    CHECK(a.canonical().find("threads") == std::string::npos);
}

TEST_CASE("config set and mode parsing") {
    ExperimentConfig c;
    c.set("n", "64");
    c.set("lambda", "0.5");
    c.set("burn_in", "10");
    c.set("dev-const", "4");
    c.set("mode", "driven");
    CHECK(c.n_sites == 64);
    CHECK(c.lambda == 0.5);
    CHECK(c.burn_in == 10);
    CHECK(c.deviation_constant == 4.0);
    CHECK(c.mode == SamplingMode::Driven);
    CHECK_THROWS_AS(c.set("n", "abc"), ConfigError);
    CHECK_THROWS_AS(c.set("n", "12x"), ConfigError);
    CHECK_THROWS_AS(c.set("colour", "1"), ConfigError);
    CHECK_THROWS_AS(parse_mode("sideways"), ConfigError);
    for (SamplingMode m : {SamplingMode::Hitting, SamplingMode::Driven, SamplingMode::Exact}) {
        CHECK(parse_mode(to_string(m)) == m);
    }
}

TEST_CASE("config file") {
    const auto path = temp_path("config.txt");
    {
        std::ofstream out(path);
        out << "# comment\n\nn = 40\nlambda=3\n  seed=9  \n";
    }
    const ExperimentConfig c = load_config_file(path);
    CHECK(c.n_sites == 40);
    CHECK(c.lambda == 3.0);
    CHECK(c.seed == 9);
    {
        std::ofstream out(path);
        out << "n 40\n";
    }
    CHECK_THROWS_AS(load_config_file(path), ConfigError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_config_file(temp_path("missing.txt")), ConfigError);
}

TEST_CASE("exact report on one vertex") {
    ExperimentConfig c;
    c.n_sites = 1;
    c.mode = SamplingMode::Exact;
    const StationaryRun run = run_stationary_sampling(c);
    CHECK(run.report.mode == "exact");
    CHECK(run.report.mean_count == doctest::Approx(0.5));
    CHECK(run.report.sd_count == doctest::Approx(0.5));
    CHECK(std::isnan(run.report.shift_estimate));
    CHECK(run.weights.size() == 2);
}

TEST_CASE("window report on a weighted sample") {
    const ModelParams p(100, 1.0);
    const double w = p.window_scale();
    const std::vector<std::int64_t> counts{50, 50 + static_cast<std::int64_t>(0.5 * w), 0};
    const WindowReport r = window_report(p, 0.25, 1.0, counts, {1.0, 1.0, 1.0}, false);
    CHECK(r.samples == 3);
    CHECK(r.min_count == 0);
    CHECK(r.max_count == counts[1]);
    CHECK(r.in_window_fraction == doctest::Approx(1.0 / 3.0));
    CHECK(r.within_deviation_fraction == doctest::Approx(2.0 / 3.0));
    CHECK(r.below_deviation_fraction == doctest::Approx(1.0 / 3.0));
    CHECK(r.shift_lower_99 < r.shift_estimate);
    const WindowReport empty = window_report(p, 0.25, 1.0, {}, {}, false);
    CHECK(empty.samples == 0);
}

TEST_CASE("hitting runs report truncation") {
    ExperimentConfig c;
    c.n_sites = 50;
    c.trials = 6;
    c.max_steps = 1;
    const StationaryRun run = run_stationary_sampling(c);
    CHECK(run.report.truncated == 6);
    CHECK(run.counts.empty());
    for (auto s : run.absorption_steps) CHECK(s == -1);
}

TEST_CASE("hitting runs are independent of the thread count") {
    ExperimentConfig c;
    c.n_sites = 200;
    c.trials = 12;
    c.threads = 1;
    const StationaryRun one = run_stationary_sampling(c);
    c.threads = 4;
    const StationaryRun four = run_stationary_sampling(c);
    CHECK(one.counts == four.counts);
    CHECK(one.absorption_steps == four.absorption_steps);
    CHECK(one.report.truncated == 0);
}

TEST_CASE("driven sampling shape") {
    ExperimentConfig c;
    c.n_sites = 20;
    c.mode = SamplingMode::Driven;
    c.trials = 3;
    c.samples = 50;
    c.burn_in = 100;
    const StationaryRun run = run_stationary_sampling(c);
    CHECK(run.counts.size() == 150);
    CHECK(run.trial_of.front() == 0);
    CHECK(run.trial_of.back() == 2);
    for (auto k : run.counts) {
        CHECK(k >= 0);
        CHECK(k <= 20);
    }
}

TEST_CASE("suite output is deterministic") {
    ExperimentConfig c;
    c.threads = 1;
    const SuiteResult a = run_suite(c, "identities");
    c.threads = 3;
    const SuiteResult b = run_suite(c, "identities");
    CHECK(a.json == b.json);
    CHECK(a.passed);
    CHECK(a.json.find("\"suite\": \"identities\"") != std::string::npos);
    CHECK_THROWS_AS(run_suite(c, "nonsense"), ConfigError);
    CHECK(suite_names().size() == 6);
}

TEST_CASE("check helper") {
    CHECK(checks::within("x", 1.0, 0.0, 2.0).passed);
    CHECK_FALSE(checks::within("x", 3.0, 0.0, 2.0).passed);
    CHECK_FALSE(checks::within("x", std::nan(""), std::nullopt, std::nullopt).passed);
    CHECK(checks::within("x", -5.0, std::nullopt, 0.0).passed);
}

TEST_CASE("CSV writer") {
    const auto path = temp_path("out.csv");
    ExperimentConfig c;
    {
        CsvWriter w(path, c, {"k", "value"});
        w.row(0, {"1", format_double(0.25)});
        CHECK_THROWS_AS(w.row(1, {"1"}), std::logic_error);
    }
    const std::string text = slurp(path);
    CHECK(text == "config_hash,seed,trial,k,value\n" + c.hash() + ",1,0,1,0.25\n");
    std::filesystem::remove(path);
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
}
