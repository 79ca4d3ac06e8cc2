// Acceptance runner: one PASS/FAIL line per criterion, preceded by the checks
// that decide it. Pass criterion numbers as arguments to run a subset.

#include "arw/checks.hpp"
#include "arw/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

using namespace arw;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::function<std::vector<Check>()> run;
};

std::string bound_text(const Check& c) {
    std::string lo = c.lower ? format_double(*c.lower) : "-inf";
    std::string hi = c.upper ? format_double(*c.upper) : "+inf";
    return "[" + lo + ", " + hi + "]";
}

std::vector<Check> pick(const std::vector<Check>& all, const std::set<std::string>& names,
                        std::vector<Check>* rest = nullptr) {
    std::vector<Check> out;
    for (const auto& c : all) {
        if (names.count(c.name)) {
            out.push_back(c);
        } else if (rest) {
            rest->push_back(c);
        }
    }
    if (out.size() != names.size()) {
        Check missing{"missing_checks", static_cast<double>(names.size() - out.size()), std::nullopt, 0.0, false};
        out.push_back(missing);
    }
    return out;
}

Check flag(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, 1.0, ok}; }

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    const checks::Context ctx{1, 0};

    // Checks run for information alongside a criterion but do not decide it.
    std::vector<Check> extra;

    StationaryRun hitting;
    bool hitting_done = false;
    auto hitting_run = [&]() -> const StationaryRun& {
        if (!hitting_done) {
            ExperimentConfig c;
            c.n_sites = 10000;
            c.lambda = 1.0;
            c.seed = 1;
            c.trials = 500;
            c.mode = SamplingMode::Hitting;
            c.deviation_constant = 6.0;
            c.epsilon_window = 0.25;
            hitting = run_stationary_sampling(c);
            hitting_done = true;
        }
        return hitting;
    };

    const std::vector<Criterion> criteria{
        {1, "exact identities", [] { return checks::identities(); }},
        {2, "oracle equivalence", [&] { return checks::oracles(ctx); }},
        {3, "stationary solver",
         [] {
             return pick(checks::exact_solver(), {"exact_n1_max_error", "exact_normalisation_max_error",
                                                  "exact_dense_vs_hessenberg"});
         }},
        {4, "counts concentrate around rho_c N (N=1e4, 500 samples)",
         [&] {
             const auto& run = hitting_run();
             auto out = pick(checks::window(run.report), {"within_deviation_fraction", "below_deviation_fraction"});
             out.push_back(checks::within("samples", static_cast<double>(run.report.samples), 500.0, 500.0));
             return out;
         }},
        {5, "supercritical shift (N=1e4, 500 samples)",
         [&] {
             const auto& run = hitting_run();
             return pick(checks::window(run.report), {"shift_estimate", "shift_lower_99"}, &extra);
         }},
        {6, "stabilization time", [&] { return checks::stabilization_time(ctx, 1000, 200, 0.9); }},
        {7, "coarse-grain pipeline",
         [&] {
             return pick(checks::coarse_grain(ctx),
                         {"theta_star_ratio_min", "theta_star_ratio_max", "exit_ratio_max_relative_error",
                          "resistance_vs_linear_max_diff"},
                         &extra);
         }},
        {8, "OU scaling",
         [&] {
             return pick(checks::scaling(ctx),
                         {"rescaled_drift_coefficient", "rescaled_variance_coefficient", "ou_stationary_variance",
                          "passage_median_ratio"},
                         &extra);
         }},
        {9, "determinism across thread counts",
         [] {
             std::vector<Check> out;
             ExperimentConfig base;
             base.n_sites = 300;
             base.trials = 40;
             for (const std::string suite : {"identities", "coarse_grain", "drift", "stationary"}) {
                 ExperimentConfig c = base;
                 c.threads = 1;
                 const std::string a = run_suite(c, suite).json;
                 c.threads = 4;
                 const std::string b = run_suite(c, suite).json;
                 c.threads = 1;
                 const std::string again = run_suite(c, suite).json;
                 out.push_back(flag(suite + "_json_identical", a == b && a == again && !a.empty()));
             }
             return out;
         }},
    };

    bool all = true;
    for (const auto& cr : criteria) {
        if (!only.empty() && !only.count(cr.id)) continue;
        extra.clear();
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<Check> checks;
        std::string error;
        try {
            checks = cr.run();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool ok = error.empty() && !checks.empty();
        for (const auto& c : checks) {
            ok = ok && c.passed;
            std::printf("  %-4s %-36s %-24s %s\n", c.passed ? "ok" : "BAD", c.name.c_str(),
                        format_double(c.measured).c_str(), bound_text(c).c_str());
        }
        for (const auto& c : extra) {
            std::printf("  info %-36s %-24s %s%s\n", c.name.c_str(), format_double(c.measured).c_str(),
                        bound_text(c).c_str(), c.passed ? "" : " (outside)");
        }
        if (!error.empty()) std::printf("  error: %s\n", error.c_str());
        std::printf("%s criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", cr.id, cr.title.c_str(), secs);
        std::fflush(stdout);
        all = all && ok;
    }
    return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
