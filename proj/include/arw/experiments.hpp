#pragma once

// Experiment driver: configuration, seeded trial execution, stationary-window
// statistics, check suites with JSON summaries, and CSV output.

#include "arw/model.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace arw {

enum class SamplingMode : std::uint8_t { Hitting, Driven, Exact };

std::string to_string(SamplingMode mode);
SamplingMode parse_mode(const std::string& text);

/// Invalid configuration or usage; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::int64_t n_sites = 1000;
    double lambda = 1.0;
    std::uint64_t seed = 1;
    std::int64_t trials = 100;
    std::int64_t burn_in = -1;  // -1: 10 N additions (driven mode)
    std::int64_t samples = 10'000;
    unsigned threads = 0;       // 0: hardware concurrency; never affects results
    double epsilon_window = 0.25;
    double deviation_constant = 6.0;
    SamplingMode mode = SamplingMode::Hitting;
    std::int64_t max_steps = -1;  // -1: 20 (1 + lambda) N^2 per hitting run

    ModelParams params() const { return {n_sites, lambda}; }
    std::int64_t effective_burn_in() const { return burn_in >= 0 ? burn_in : 10 * n_sites; }
    std::int64_t effective_max_steps() const;

    /// Throws ConfigError.
    void validate() const;
    /// Canonical key=value text of every result-affecting field (threads excluded).
    std::string canonical() const;
    /// 16 hex digits of FNV-1a over canonical().
    std::string hash() const;

    /// Applies one key=value setting; keys match the long CLI flags without dashes.
    void set(const std::string& key, const std::string& value);
};

/// Reads a flat key=value file ('#' comments, blank lines ignored) on top of `base`.
ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base = {});

struct WindowReport {
    std::string mode;
    std::int64_t samples = 0;
    std::int64_t truncated = 0;
    double mean_count = 0.0;
    double sd_count = 0.0;
    double shift_estimate = 0.0;         // (mean - rho_c N)/sqrt(N log N)
    double shift_lower_99 = 0.0;         // one-sided 99% lower confidence bound on the shift
    double in_window_fraction = 0.0;     // within rho_c N + (a +- eps) sqrt(N log N)
    double within_deviation_fraction = 0.0;  // within rho_c N +- A sqrt(N log N)
    double below_deviation_fraction = 0.0;   // below rho_c N - A sqrt(N log N)
    std::int64_t min_count = 0;
    std::int64_t max_count = 0;
};

struct StationaryRun {
    WindowReport report;
    /// One entry per sample in trial order; exact mode stores mu_k in `weights`.
    std::vector<std::int64_t> counts;
    std::vector<std::int64_t> trial_of;
    std::vector<double> weights;
    std::vector<std::int64_t> absorption_steps;  // hitting mode, -1 when truncated
};

/// Hitting: one sample per stabilization from (N, N), `trials` samples.
/// Driven: `trials` independent chains, each burned in then sampled `samples` times.
/// Exact: statistics of the exact law (N <= 300).
StationaryRun run_stationary_sampling(const ExperimentConfig& config);

/// Window statistics of a weighted sample.
WindowReport window_report(const ModelParams& params, double epsilon, double deviation_constant,
                           const std::vector<std::int64_t>& counts, const std::vector<double>& weights,
                           bool weights_are_probabilities);

struct Check {
    std::string name;
    double measured = 0.0;
    std::optional<double> lower;
    std::optional<double> upper;
    bool passed = false;
};

struct SuiteResult {
    std::string suite;
    std::vector<Check> checks;
    bool passed = false;
    std::string json;  // deterministic summary, identical across thread counts
};

const std::vector<std::string>& suite_names();

/// Throws ConfigError for an unknown suite.
SuiteResult run_suite(const ExperimentConfig& config, const std::string& suite_name);

/// Serialises a check list the same way run_suite does.
std::string suite_json(const ExperimentConfig& config, const std::string& suite,
                       const std::vector<Check>& checks);

/// CSV with a header row; every row is prefixed by (config_hash, seed, trial).
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const ExperimentConfig& config,
              const std::vector<std::string>& columns);

    void row(std::int64_t trial, const std::vector<std::string>& values);

private:
    std::string hash_;
    std::uint64_t seed_;
    std::size_t width_;
    std::ofstream out_;
};

/// Shortest round-trip decimal text of a double.
std::string format_double(double v);

}  // namespace arw
