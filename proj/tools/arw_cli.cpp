// arw: command-line driver for the count chain, stationary sampling and check suites.
//
// Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.

#include "arw/coarse_grain.hpp"
#include "arw/count_chain.hpp"
#include "arw/experiments.hpp"
#include "arw/moment_analysis.hpp"
#include "arw/scaling_limit.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

namespace {

using arw::ExperimentConfig;
using arw::format_double;

struct CommonFlags {
    std::map<std::string, std::string> values;
    std::string config_path;
    std::string out;

    void attach(CLI::App* app) {
        static const std::pair<const char*, const char*> keys[] = {
            {"n", "number of vertices N"},
            {"lambda", "sleep rate"},
            {"seed", "master seed"},
            {"trials", "independent trials"},
            {"burn-in", "driven-chain additions discarded per trial"},
            {"samples", "driven-chain samples per trial"},
            {"threads", "worker threads (0: all cores)"},
            {"mode", "hitting, driven or exact"},
            {"epsilon", "half-width of the shift window"},
            {"dev-const", "deviation constant A"},
            {"max-steps", "step cap per hitting run"},
        };
        for (const auto& [key, help] : keys) {
            app->add_option_function<std::string>(
                std::string("--") + key, [this, k = std::string(key)](const std::string& v) { values[k] = v; },
                help);
        }
        app->add_option("--config", config_path, "key=value configuration file; flags override it");
        app->add_option("--out", out, "output directory (created if missing)");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = arw::load_config_file(config_path, cfg);
        for (const auto& [k, v] : values) cfg.set(k, v);
        cfg.validate();
        return cfg;
    }
};

std::filesystem::path out_file(const CommonFlags& flags, const char* name) {
    const std::filesystem::path dir(flags.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw arw::ConfigError("cannot create output directory " + flags.out);
    return dir / name;
}

void print_report(const arw::WindowReport& r) {
    std::printf("mode=%s samples=%lld truncated=%lld\n", r.mode.c_str(), static_cast<long long>(r.samples),
                static_cast<long long>(r.truncated));
    std::printf("mean=%.3f sd=%.3f min=%lld max=%lld\n", r.mean_count, r.sd_count,
                static_cast<long long>(r.min_count), static_cast<long long>(r.max_count));
    std::printf("shift=%.4f shift_lower_99=%.4f\n", r.shift_estimate, r.shift_lower_99);
    std::printf("in_window=%.4f within_deviation=%.4f below_deviation=%.4f\n", r.in_window_fraction,
                r.within_deviation_fraction, r.below_deviation_fraction);
}

int cmd_stationary(const CommonFlags& flags) {
    const ExperimentConfig cfg = flags.resolve();
    const arw::StationaryRun run = arw::run_stationary_sampling(cfg);
    print_report(run.report);
    if (!flags.out.empty()) {
        if (cfg.mode == arw::SamplingMode::Exact) {
            arw::CsvWriter csv(out_file(flags, "exact.csv"), cfg, {"k", "mu_k"});
            for (std::size_t i = 0; i < run.counts.size(); ++i) {
                csv.row(0, {std::to_string(run.counts[i]), format_double(run.weights[i])});
            }
        } else {
            arw::CsvWriter csv(out_file(flags, "stationary.csv"), cfg, {"count"});
            for (std::size_t i = 0; i < run.counts.size(); ++i) {
                csv.row(run.trial_of[i], {std::to_string(run.counts[i])});
            }
        }
    }
    return 0;
}

int cmd_trajectory(const CommonFlags& flags, std::int64_t stride) {
    const ExperimentConfig cfg = flags.resolve();
    const arw::ModelParams p = cfg.params();
    std::unique_ptr<arw::CsvWriter> csv;
    if (!flags.out.empty()) {
        csv = std::make_unique<arw::CsvWriter>(out_file(flags, "trajectory.csv"), cfg,
                                               std::vector<std::string>{"t", "x", "y", "s"});
    }
    for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
        arw::Stream rng(cfg.seed, static_cast<std::uint64_t>(trial));
        arw::RunOptions opts;
        opts.record_stride = stride;
        const arw::Trajectory t =
            arw::run_until_absorbed(p, {p.n_sites, p.n_sites}, rng, cfg.effective_max_steps(), opts);
        std::printf("trial=%lld steps=%lld final_x=%lld truncated=%d\n", static_cast<long long>(trial),
                    static_cast<long long>(t.steps), static_cast<long long>(t.final_state.x), t.truncated ? 1 : 0);
        if (csv) {
            for (const auto& pt : t.path) {
                csv->row(trial, {std::to_string(pt.t), std::to_string(pt.x), std::to_string(pt.y),
                                 format_double(static_cast<double>(pt.y) - (1.0 + p.lambda) * static_cast<double>(pt.x) +
                                               p.lambda * p.n())});
            }
        }
    }
    return 0;
}

int cmd_drift_scan(const CommonFlags& flags, double b_min, double b_max, int points) {
    const ExperimentConfig cfg = flags.resolve();
    const arw::ModelParams p = cfg.params();
    const arw::DeviationFrame frame(p);
    std::unique_ptr<arw::CsvWriter> csv;
    if (!flags.out.empty()) {
        csv = std::make_unique<arw::CsvWriter>(out_file(flags, "drift_scan.csv"), cfg,
                                               std::vector<std::string>{"x", "y", "quantity", "value"});
    }
    for (int i = 0; i < points; ++i) {
        const double b = points == 1 ? b_min : b_min + (b_max - b_min) * i / (points - 1);
        const auto x = std::llround(p.rho_c() * p.n() + b * p.window_scale());
        if (x < 1 || x > p.n_sites) continue;
        const auto ell = frame.ell_at(static_cast<double>(x));
        for (double s : {-2.0 * frame.eps_n * p.n(), -frame.eps_n * p.n(), 0.0, frame.eps_n * p.n()}) {
            const auto y = std::llround(ell + s);
            if (y < 1 || y > x) continue;
            const arw::CountState st{x, y};
            const std::pair<const char*, double> rows[] = {
                {"drift", arw::drift_exact(p, st)},
                {"second_moment", arw::second_moment_exact(p, st)},
                {"supermartingale_margin", arw::supermartingale_margin(p, st, 0.01, frame.eps_n)},
            };
            for (const auto& [name, value] : rows) {
                std::printf("x=%lld y=%lld %s=%.6g\n", static_cast<long long>(x), static_cast<long long>(y), name,
                            value);
                if (csv) csv->row(0, {std::to_string(x), std::to_string(y), name, format_double(value)});
            }
        }
    }
    return 0;
}

int cmd_coarse_grain(const CommonFlags& flags, double x_hat) {
    const ExperimentConfig cfg = flags.resolve();
    const arw::ModelParams p = cfg.params();
    if (x_hat <= 0.0) x_hat = p.shift_constant();
    const arw::CoarseChain cc = arw::build_coarse_chain(p, x_hat);
    const auto r = arw::birth_death_resistance(cc.chain);
    std::unique_ptr<arw::CsvWriter> csv;
    if (!flags.out.empty()) {
        csv = std::make_unique<arw::CsvWriter>(out_file(flags, "coarse_grain.csv"), cfg,
                                               std::vector<std::string>{"k", "delta_k", "theta_star", "f_k", "r_k"});
    }
    for (std::size_t i = 0; i < cc.bands.size(); ++i) {
        const auto& band = cc.bands[i];
        const arw::TiltRoot root = arw::theta_star(p, band);
        // r[0] belongs to the bottom edge, so band i owns r[i + 1].
        const double rk = r[i + 1];
        std::printf("k=%lld delta=%.6g theta=%.6g f=%.6g r=%.6g\n", static_cast<long long>(band.k), band.delta,
                    root.theta, cc.f[i], rk);
        if (csv) {
            csv->row(0, {std::to_string(band.k), format_double(band.delta), format_double(root.theta),
                         format_double(cc.f[i]), format_double(rk)});
        }
    }
    std::printf("P[top before bottom | k=0] = %.6g\n", arw::hitting_probability(cc.chain, 0));
    return 0;
}

int cmd_ou_compare(const CommonFlags& flags, double multiplier, double horizon) {
    const ExperimentConfig cfg = flags.resolve();
    arw::PassageOptions po;
    po.horizon = horizon;
    po.threads = cfg.threads;
    const arw::PassageDichotomy d = arw::first_passage_compare(cfg.params(), multiplier, cfg.trials, cfg.seed, po);
    for (const auto* c : {&d.slow, &d.fast}) {
        std::printf("level=%.4f median_chain=%.4f median_ou=%.4f ks=%.4f\n", c->level, c->median_chain,
                    c->median_ou, c->ks_statistic);
    }
    std::printf("median_ratio=%.4f%s\n", d.median_ratio, d.ratio_is_lower_bound ? " (lower bound)" : "");
    if (!flags.out.empty()) {
        arw::CsvWriter csv(out_file(flags, "passage.csv"), cfg, {"process", "level", "time", "censored"});
        for (const auto* c : {&d.slow, &d.fast}) {
            for (std::size_t i = 0; i < c->chain.size(); ++i) {
                csv.row(static_cast<std::int64_t>(i), {"chain", format_double(c->level), format_double(c->chain[i].time),
                                                       c->chain[i].censored ? "1" : "0"});
            }
            for (std::size_t i = 0; i < c->ou.size(); ++i) {
                csv.row(static_cast<std::int64_t>(i), {"ou", format_double(c->level), format_double(c->ou[i].time),
                                                       c->ou[i].censored ? "1" : "0"});
            }
        }
    }
    return 0;
}

int cmd_suite(const CommonFlags& flags, const std::string& name) {
    const ExperimentConfig cfg = flags.resolve();
    const arw::SuiteResult r = arw::run_suite(cfg, name);
    std::cout << r.json;
    if (!flags.out.empty()) {
        const auto path = out_file(flags, (name + ".json").c_str());
        std::ofstream out(path);
        if (!out) throw arw::ConfigError("cannot write " + path.string());
        out << r.json;
    }
    return r.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Activated random walk on the complete graph"};
    app.require_subcommand(1);

    CommonFlags stationary_flags, trajectory_flags, identities_flags, drift_flags, coarse_flags, ou_flags, suite_flags;

    auto* stationary = app.add_subcommand("stationary", "sample the stationary particle count");
    stationary_flags.attach(stationary);

    std::int64_t stride = 1000;
    auto* trajectory = app.add_subcommand("trajectory", "record count-chain trajectories from (N, N)");
    trajectory_flags.attach(trajectory);
    trajectory->add_option("--stride", stride, "record every stride-th state");

    auto* identities = app.add_subcommand("identities", "check the exact identities");
    identities_flags.attach(identities);

    double b_min = -1.0, b_max = 2.0;
    int points = 7;
    auto* drift = app.add_subcommand("drift-scan", "drift and second moment on window states");
    drift_flags.attach(drift);
    drift->add_option("--b-min", b_min, "lowest window coordinate");
    drift->add_option("--b-max", b_max, "highest window coordinate");
    drift->add_option("--points", points, "number of window coordinates")->check(CLI::PositiveNumber);

    double x_hat = 0.0;
    auto* coarse = app.add_subcommand("coarse-grain", "band parameters and the coarse birth-and-death chain");
    coarse_flags.attach(coarse);
    coarse->add_option("--x-hat", x_hat, "window coordinate of the anchor (default: shift constant)");

    double multiplier = 1.0, horizon = 50.0;
    auto* ou = app.add_subcommand("ou-compare", "first passages of the rescaled chain and the OU process");
    ou_flags.attach(ou);
    ou->add_option("--multiplier", multiplier, "level multiplier");
    ou->add_option("--horizon", horizon, "censoring horizon in rescaled time");

    std::string suite_name;
    auto* suite = app.add_subcommand("suite", "run a named check suite and print a JSON summary");
    suite_flags.attach(suite);
    suite->add_option("name", suite_name, "suite name")->required()->check(CLI::IsMember(arw::suite_names()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*stationary) return cmd_stationary(stationary_flags);
        if (*trajectory) return cmd_trajectory(trajectory_flags, stride);
        if (*identities) return cmd_suite(identities_flags, "identities");
        if (*drift) return cmd_drift_scan(drift_flags, b_min, b_max, points);
        if (*coarse) return cmd_coarse_grain(coarse_flags, x_hat);
        if (*ou) return cmd_ou_compare(ou_flags, multiplier, horizon);
        if (*suite) return cmd_suite(suite_flags, suite_name);
    } catch (const arw::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const arw::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
