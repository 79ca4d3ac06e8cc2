#include "arw/experiments.hpp"

#include "arw/checks.hpp"
#include "arw/count_chain.hpp"
#include "arw/exact_solver.hpp"
#include "arw/micro_dynamics.hpp"
#include "arw/parallel.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace arw {

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("invalid value '" + text + "' for '" + key + "'");
    }
    return value;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

// JSON has no infinities; they are written as strings.
nlohmann::ordered_json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

}  // namespace

std::string to_string(SamplingMode mode) {
    switch (mode) {
        case SamplingMode::Hitting: return "hitting";
        case SamplingMode::Driven: return "driven";
        case SamplingMode::Exact: return "exact";
    }
    return "?";
}

SamplingMode parse_mode(const std::string& text) {
    if (text == "hitting") return SamplingMode::Hitting;
    if (text == "driven") return SamplingMode::Driven;
    if (text == "exact") return SamplingMode::Exact;
    throw ConfigError("unknown mode '" + text + "' (expected hitting, driven or exact)");
}

std::int64_t ExperimentConfig::effective_max_steps() const {
    if (max_steps > 0) return max_steps;
    const double cap = 20.0 * (1.0 + lambda) * static_cast<double>(n_sites) * static_cast<double>(n_sites);
    return static_cast<std::int64_t>(std::min(cap, 9.0e18));
}

void ExperimentConfig::validate() const {
    if (n_sites < 1) throw ConfigError("n must be >= 1");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be positive and finite");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (samples < 1) throw ConfigError("samples must be >= 1");
    if (burn_in < -1) throw ConfigError("burn-in must be >= 0");
    if (!(epsilon_window > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(deviation_constant > 0.0)) throw ConfigError("dev-const must be positive");
    if (mode == SamplingMode::Exact && n_sites > 300) throw ConfigError("exact mode supports n <= 300");
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream os;
    os << "n=" << n_sites << ";lambda=" << format_double(lambda) << ";seed=" << seed << ";trials=" << trials
       << ";burn_in=" << effective_burn_in() << ";samples=" << samples
       << ";epsilon=" << format_double(epsilon_window) << ";dev_const=" << format_double(deviation_constant)
       << ";mode=" << to_string(mode) << ";max_steps=" << effective_max_steps();
    return os.str();
}

std::string ExperimentConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void ExperimentConfig::set(const std::string& raw_key, const std::string& raw_value) {
    std::string key = trim(raw_key);
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string value = trim(raw_value);
    if (key == "n") {
        n_sites = parse_number<std::int64_t>(key, value);
    } else if (key == "lambda") {
        lambda = parse_number<double>(key, value);
    } else if (key == "seed") {
        seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "trials") {
        trials = parse_number<std::int64_t>(key, value);
    } else if (key == "burn-in") {
        burn_in = parse_number<std::int64_t>(key, value);
    } else if (key == "samples") {
        samples = parse_number<std::int64_t>(key, value);
    } else if (key == "threads") {
        threads = parse_number<unsigned>(key, value);
    } else if (key == "epsilon") {
        epsilon_window = parse_number<double>(key, value);
    } else if (key == "dev-const") {
        deviation_constant = parse_number<double>(key, value);
    } else if (key == "mode") {
        mode = parse_mode(value);
    } else if (key == "max-steps") {
        max_steps = parse_number<std::int64_t>(key, value);
    } else {
        throw ConfigError("unknown configuration key '" + raw_key + "'");
    }
}

ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        }
        base.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

WindowReport window_report(const ModelParams& params, double epsilon, double deviation_constant,
                           const std::vector<std::int64_t>& counts, const std::vector<double>& weights,
                           bool weights_are_probabilities) {
    WindowReport r;
    if (counts.empty()) return r;
    const double centre = params.rho_c() * params.n();
    const double w = params.window_scale();
    const double a = params.shift_constant();
    const double lo_win = centre + (a - epsilon) * w;
    const double hi_win = centre + (a + epsilon) * w;
    const double lo_dev = centre - deviation_constant * w;
    const double hi_dev = centre + deviation_constant * w;

    double total = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        total += weights[i];
        mean += weights[i] * static_cast<double>(counts[i]);
    }
    mean /= total;
    double var = 0.0, in_win = 0.0, in_dev = 0.0, below = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double c = static_cast<double>(counts[i]);
        var += weights[i] * (c - mean) * (c - mean);
        if (c >= lo_win && c <= hi_win) in_win += weights[i];
        if (c >= lo_dev && c <= hi_dev) in_dev += weights[i];
        if (c < lo_dev) below += weights[i];
        if (weights[i] > 0.0) {
            r.min_count = first ? counts[i] : std::min(r.min_count, counts[i]);
            r.max_count = first ? counts[i] : std::max(r.max_count, counts[i]);
            first = false;
        }
    }
    var /= total;
    in_win /= total;
    in_dev /= total;
    below /= total;
    r.samples = static_cast<std::int64_t>(counts.size());
    r.mean_count = mean;
    r.in_window_fraction = in_win;
    r.within_deviation_fraction = in_dev;
    r.below_deviation_fraction = below;
    r.shift_estimate = (mean - centre) / w;
    if (weights_are_probabilities || counts.size() < 2) {
        r.sd_count = std::sqrt(var);
        r.shift_lower_99 = r.shift_estimate;
    } else {
        const double n = static_cast<double>(counts.size());
        r.sd_count = std::sqrt(var * n / (n - 1.0));
        const boost::math::students_t t(n - 1.0);
        const double q = boost::math::quantile(t, 0.99);
        r.shift_lower_99 = (mean - q * r.sd_count / std::sqrt(n) - centre) / w;
    }
    return r;
}

StationaryRun run_stationary_sampling(const ExperimentConfig& config) {
    config.validate();
    const ModelParams params = config.params();
    StationaryRun run;

    switch (config.mode) {
        case SamplingMode::Exact: {
            const StationaryDist mu = stationary_exact(params);
            for (std::int64_t k = 0; k <= params.n_sites; ++k) {
                run.counts.push_back(k);
                run.trial_of.push_back(0);
                run.weights.push_back(mu.mass[static_cast<std::size_t>(k)]);
            }
            run.report = window_report(params, config.epsilon_window, config.deviation_constant, run.counts,
                                       run.weights, true);
            break;
        }
        case SamplingMode::Hitting: {
            struct Outcome {
                std::int64_t count = 0;
                std::int64_t steps = 0;
                bool truncated = false;
            };
            const std::int64_t cap = config.effective_max_steps();
            const auto outcomes = parallel_trials<Outcome>(config.trials, config.threads, [&](std::int64_t i) {
                Stream rng(config.seed, static_cast<std::uint64_t>(i));
                RunOptions opts;
                opts.record_stride = 0;
                const Trajectory t = run_until_absorbed(params, {params.n_sites, params.n_sites}, rng, cap, opts);
                return Outcome{t.final_state.x, t.steps, t.truncated};
            });
            for (std::size_t i = 0; i < outcomes.size(); ++i) {
                const auto& o = outcomes[i];
                run.absorption_steps.push_back(o.truncated ? -1 : o.steps);
                if (o.truncated) {
                    ++run.report.truncated;
                    continue;
                }
                run.counts.push_back(o.count);
                run.trial_of.push_back(static_cast<std::int64_t>(i));
                run.weights.push_back(1.0);
            }
            const std::int64_t truncated = run.report.truncated;
            run.report = window_report(params, config.epsilon_window, config.deviation_constant, run.counts,
                                       run.weights, false);
            run.report.truncated = truncated;
            break;
        }
        case SamplingMode::Driven: {
            const std::int64_t burn = config.effective_burn_in();
            const auto chains = parallel_trials<std::vector<std::int64_t>>(
                config.trials, config.threads, [&](std::int64_t i) {
                    Stream rng(config.seed, static_cast<std::uint64_t>(i));
                    MicroConfig start = MicroConfig::all_active(params.n_sites);
                    stabilize_in_place(params, start, rng);
                    DrivenChain chain(params, std::move(start));
                    for (std::int64_t b = 0; b < burn; ++b) chain.advance(rng);
                    std::vector<std::int64_t> counts;
                    counts.reserve(static_cast<std::size_t>(config.samples));
                    for (std::int64_t s = 0; s < config.samples; ++s) counts.push_back(chain.advance(rng).particle_count);
                    return counts;
                });
            for (std::size_t i = 0; i < chains.size(); ++i) {
                for (auto c : chains[i]) {
                    run.counts.push_back(c);
                    run.trial_of.push_back(static_cast<std::int64_t>(i));
                    run.weights.push_back(1.0);
                }
            }
            run.report = window_report(params, config.epsilon_window, config.deviation_constant, run.counts,
                                       run.weights, false);
            break;
        }
    }
    run.report.mode = to_string(config.mode);
    return run;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"identities", "oracles", "drift",
                                                "coarse_grain", "scaling", "stationary"};
    return names;
}

std::string suite_json(const ExperimentConfig& config, const std::string& suite, const std::vector<Check>& checks) {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["config"] = {{"hash", config.hash()},
                   {"n", config.n_sites},
                   {"lambda", config.lambda},
                   {"seed", config.seed},
                   {"trials", config.trials},
                   {"burn_in", config.effective_burn_in()},
                   {"samples", config.samples},
                   {"epsilon", config.epsilon_window},
                   {"dev_const", config.deviation_constant},
                   {"mode", to_string(config.mode)}};
    bool all = true;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        all = all && c.passed;
        arr.push_back({{"name", c.name},
                       {"measured", number(c.measured)},
                       {"lower", optional_number(c.lower)},
                       {"upper", optional_number(c.upper)},
                       {"passed", c.passed}});
    }
    j["passed"] = all;
    j["checks"] = std::move(arr);
    return j.dump(2) + "\n";
}

SuiteResult run_suite(const ExperimentConfig& config, const std::string& suite_name) {
    config.validate();
    const checks::Context ctx{config.seed, config.threads};
    SuiteResult r;
    r.suite = suite_name;
    if (suite_name == "identities") {
        r.checks = checks::identities();
    } else if (suite_name == "oracles") {
        r.checks = checks::oracles(ctx);
    } else if (suite_name == "drift") {
        r.checks = checks::drift(ctx);
    } else if (suite_name == "coarse_grain") {
        r.checks = checks::coarse_grain(ctx);
    } else if (suite_name == "scaling") {
        r.checks = checks::scaling(ctx);
    } else if (suite_name == "stationary") {
        const StationaryRun run = run_stationary_sampling(config);
        r.checks = checks::window(run.report);
        if (run.report.truncated > 0) {
            r.checks.push_back(checks::within("truncated_runs", static_cast<double>(run.report.truncated), 0.0, 0.0));
        }
        const auto exact = checks::exact_solver();
        r.checks.insert(r.checks.end(), exact.begin(), exact.end());
        const auto stab = checks::stabilization_time(ctx);
        r.checks.insert(r.checks.end(), stab.begin(), stab.end());
    } else {
        throw ConfigError("unknown suite '" + suite_name + "'");
    }
    r.passed = std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.passed; });
    r.json = suite_json(config, suite_name, r.checks);
    return r;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const ExperimentConfig& config,
                     const std::vector<std::string>& columns)
    : hash_(config.hash()), seed_(config.seed), width_(columns.size()), out_(path) {
    if (!out_) throw ConfigError("cannot write " + path.string());
    out_ << "config_hash,seed,trial";
    for (const auto& c : columns) out_ << ',' << c;
    out_ << '\n';
}

void CsvWriter::row(std::int64_t trial, const std::vector<std::string>& values) {
    if (values.size() != width_) throw std::logic_error("CSV row width mismatch");
    out_ << hash_ << ',' << seed_ << ',' << trial;
    for (const auto& v : values) out_ << ',' << v;
    out_ << '\n';
}

std::string format_double(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace arw
