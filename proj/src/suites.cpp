#include "arw/checks.hpp"

#include "arw/coarse_grain.hpp"
#include "arw/count_chain.hpp"
#include "arw/exact_solver.hpp"
#include "arw/micro_dynamics.hpp"
#include "arw/moment_analysis.hpp"
#include "arw/parallel.hpp"
#include "arw/scaling_limit.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace arw::checks {

namespace {

// Stream families, so that suites sharing a master seed never reuse a stream.
enum Family : std::uint64_t {
    kEtaStep = 11,
    kDriven = 12,
    kStabilization = 13,
    kDeviation = 14,
    kOptionalStopping = 15,
    kSyntheticChains = 16,
    kRegression = 17,
    kOuMoments = 18,
    kPassage = 19,
    kPassageTrend = 20,
    kAbelian = 21,
};

std::uint64_t family_seed(const Context& ctx, Family f) { return derive_seed(ctx.seed, f); }

double relative(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::size_t outcome_index(const StepOutcome& o) {
    switch (o.kind) {
        case OutcomeKind::Sleep: return 0;
        case OutcomeKind::Exit: return 1 + 2 * static_cast<std::size_t>(o.woken);
        case OutcomeKind::Settle: return 2 + 2 * static_cast<std::size_t>(o.woken);
    }
    return 0;
}

std::int64_t window_x(const ModelParams& p, double b) {
    return std::llround(p.rho_c() * p.n() + b * p.window_scale());
}

const double kLambdas[] = {0.1, 1.0, 10.0};

}  // namespace

Check within(std::string name, double measured, std::optional<double> lower, std::optional<double> upper) {
    const bool ok = !std::isnan(measured) && (!lower || measured >= *lower) && (!upper || measured <= *upper);
    return {std::move(name), measured, lower, upper, ok};
}

std::vector<Check> identities() {
    std::vector<Check> out;

    double norm = 0.0;
    std::vector<std::int64_t> sizes;
    for (std::int64_t n = 1; n <= 60; ++n) sizes.push_back(n);
    sizes.insert(sizes.end(), {100, 250, 500});
    for (double lam : kLambdas) {
        for (auto n : sizes) {
            const ModelParams p(n, lam);
            for (std::int64_t x = 1; x <= n; ++x) {
                for (std::int64_t y = 1; y <= x; ++y) norm = std::max(norm, std::abs(increment_law(p, {x, y}).total() - 1.0));
            }
        }
    }
    out.push_back(within("law_normalisation_max_error", norm, std::nullopt, 1e-12));

    // Pi_0 of both branches plus the sleep probability, every state up to N = 500.
    double tails = 0.0;
    for (double lam : kLambdas) {
        for (std::int64_t n = 1; n <= 500; ++n) {
            const ModelParams p(n, lam);
            for (std::int64_t x = 1; x <= n; ++x) {
                for (std::int64_t y = 1; y <= x; ++y) {
                    const double sum = pi_tail(p, {x, y}, Branch::Settle, 0) + pi_tail(p, {x, y}, Branch::Exit, 0) +
                                       p.sleep_probability();
                    tails = std::max(tails, std::abs(sum - 1.0));
                }
            }
        }
    }
    out.push_back(within("tail_normalisation_max_error", tails, std::nullopt, 1e-12));

    double first = 0.0, second = 0.0;
    for (std::int64_t n = 1; n <= 200; ++n) {
        for (std::int64_t m = n + 1; m <= 1000; ++m) {
            first = std::max(first, sum_identity_first(n, m).error());
            second = std::max(second, sum_identity_second(n, m).error());
        }
    }
    out.push_back(within("sum_identity_first_max_error", first, std::nullopt, 1e-12));
    out.push_back(within("sum_identity_second_max_error", second, std::nullopt, 1e-12));

    const double r2 = sum_identity_exp(50, 200, 1e-2).residual;
    const double r3 = sum_identity_exp(50, 200, 1e-3).residual;
    out.push_back(within("sum_identity_exp_residual_ratio", std::abs(r2 / r3), 50.0, 200.0));
    out.push_back(within("sum_identity_exp_theta0_residual", std::abs(sum_identity_exp(50, 200, 0.0).residual),
                         std::nullopt, 1e-14));

    double drift = 0.0, moment = 0.0;
    for (double lam : kLambdas) {
        for (std::int64_t n = 1; n <= 60; ++n) {
            const ModelParams p(n, lam);
            for (std::int64_t x = 1; x <= n; ++x) {
                for (std::int64_t y = 1; y <= x; ++y) {
                    drift = std::max(drift, relative(drift_exact(p, {x, y}), drift_enumerated(p, {x, y})));
                    moment = std::max(moment,
                                      relative(second_moment_exact(p, {x, y}), second_moment_enumerated(p, {x, y})));
                }
            }
        }
    }
    out.push_back(within("drift_closed_form_max_error", drift, std::nullopt, 1e-12));
    out.push_back(within("second_moment_closed_form_max_error", moment, std::nullopt, 1e-12));
    return out;
}

std::vector<Check> oracles(const Context& ctx, const OracleScale& scale) {
    std::vector<Check> out;
    const double lambda = 1.0;

    struct State {
        std::int64_t n, x, y;
    };
    std::vector<State> states;
    for (std::int64_t n = 1; n <= scale.max_sites; ++n) {
        for (std::int64_t x = 1; x <= n; ++x) {
            for (std::int64_t y = 1; y <= x; ++y) states.push_back({n, x, y});
        }
    }

    struct Tally {
        std::int64_t violations = 0;
        std::int64_t projection_mismatches = 0;
        double worst_z = 0.0;
    };
    const auto tallies = parallel_trials<Tally>(
        static_cast<std::int64_t>(states.size()), ctx.threads, [&](std::int64_t i) {
            const State st = states[static_cast<std::size_t>(i)];
            const ModelParams p(st.n, lambda);
            const CountState origin{st.x, st.y};
            MicroConfig start = MicroConfig::all_empty(st.n);
            for (std::int64_t j = 0; j < st.x; ++j) {
                start.sites[static_cast<std::size_t>(j)] = j < st.y ? Site::with_active(1) : Site::sleeper();
            }
            const IncrementLaw law = increment_law(p, origin);
            std::vector<double> expected(3 + 2 * static_cast<std::size_t>(st.x), 0.0);
            for (const auto& [o, prob] : law.entries()) expected[outcome_index(o)] += prob;
            std::vector<std::int64_t> seen(expected.size(), 0);

            Stream rng(family_seed(ctx, kEtaStep), static_cast<std::uint64_t>(i));
            Tally t;
            MicroConfig c;
            for (std::int64_t s = 0; s < scale.eta_samples; ++s) {
                c = start;
                const StepOutcome o = eta_step_in_place(p, c, rng);
                const std::size_t idx = outcome_index(o);
                if (idx >= seen.size() || count_projection(c) != o.apply(origin)) {
                    ++t.projection_mismatches;
                    continue;
                }
                ++seen[idx];
            }
            const double ns = static_cast<double>(scale.eta_samples);
            for (std::size_t k = 0; k < seen.size(); ++k) {
                const double pk = expected[k];
                const double f = static_cast<double>(seen[k]) / ns;
                const double sd = std::sqrt(pk * (1.0 - pk) / ns);
                if (std::abs(f - pk) > 4.0 * sd + 1e-12) ++t.violations;
                if (sd > 0.0) t.worst_z = std::max(t.worst_z, std::abs(f - pk) / sd);
            }
            return t;
        });
    std::int64_t violations = 0, mismatches = 0;
    double worst = 0.0;
    for (const auto& t : tallies) {
        violations += t.violations;
        mismatches += t.projection_mismatches;
        worst = std::max(worst, t.worst_z);
    }
    out.push_back(within("eta_step_outcomes_beyond_4sd", static_cast<double>(violations), std::nullopt, 0.0));
    out.push_back(within("eta_step_projection_mismatches", static_cast<double>(mismatches), std::nullopt, 0.0));
    out.push_back(within("eta_step_worst_z", worst, std::nullopt, std::nullopt));

    const ModelParams pd(scale.driven_sites, lambda);
    Stream rng(family_seed(ctx, kDriven), 0);
    MicroConfig start = MicroConfig::all_active(pd.n_sites);
    stabilize_in_place(pd, start, rng);
    DrivenChain chain(pd, std::move(start));
    for (std::int64_t b = 0; b < scale.driven_burn_in; ++b) chain.advance(rng);
    std::vector<double> hist(static_cast<std::size_t>(pd.n_sites) + 1, 0.0);
    for (std::int64_t s = 0; s < scale.driven_additions; ++s) {
        hist[static_cast<std::size_t>(chain.advance(rng).particle_count)] += 1.0;
    }
    const StationaryDist mu = stationary_exact(pd);
    double tv = 0.0;
    for (std::size_t k = 0; k < hist.size(); ++k) {
        tv += std::abs(hist[k] / static_cast<double>(scale.driven_additions) - mu.mass[k]);
    }
    out.push_back(within("driven_vs_exact_total_variation", 0.5 * tv, std::nullopt, 0.01));

    // Selection-rule invariance: thinned driven chains under both rules, two-sample chi-squared.
    const ModelParams pa(6, lambda);
    auto histogram = [&](SelectionRule rule, std::uint64_t stream) {
        StabilizeOptions opts;
        opts.rule = rule;
        Stream r(family_seed(ctx, kAbelian), stream);
        DrivenChain c(pa, MicroConfig::all_empty(pa.n_sites), opts);
        for (int b = 0; b < 1000; ++b) c.advance(r);
        std::vector<double> h(static_cast<std::size_t>(pa.n_sites) + 1, 0.0);
        for (std::int64_t s = 0; s < scale.abelian_samples; ++s) {
            for (int j = 0; j < scale.abelian_thinning - 1; ++j) c.advance(r);
            h[static_cast<std::size_t>(c.advance(r).particle_count)] += 1.0;
        }
        return h;
    };
    const auto uniform = histogram(SelectionRule::Uniform, 0);
    const auto lowest = histogram(SelectionRule::LowestSiteFirst, 1);
    double chi2 = 0.0;
    int cells = 0;
    for (std::size_t k = 0; k < uniform.size(); ++k) {
        const double n = uniform[k] + lowest[k];
        if (n == 0.0) continue;
        chi2 += (uniform[k] - lowest[k]) * (uniform[k] - lowest[k]) / n;
        ++cells;
    }
    const double pvalue = cells > 1 ? boost::math::cdf(boost::math::complement(
                                          boost::math::chi_squared(cells - 1), chi2))
                                    : 1.0;
    out.push_back(within("selection_rule_chi2_pvalue", pvalue, 0.01, std::nullopt));
    return out;
}

std::vector<Check> exact_solver() {
    std::vector<Check> out;
    double n1 = 0.0;
    for (double lam : kLambdas) {
        const StationaryDist mu = stationary_exact(ModelParams(1, lam));
        n1 = std::max(n1, std::abs(mu.mass[0] - 1.0 / (1.0 + lam)));
        n1 = std::max(n1, std::abs(mu.mass[1] - lam / (1.0 + lam)));
    }
    out.push_back(within("exact_n1_max_error", n1, std::nullopt, 1e-15));

    ExactSolverOptions hess;
    hess.solver = SliceSolver::Hessenberg;
    double norm = 0.0;
    for (std::int64_t n = 1; n <= 300; ++n) {
        norm = std::max(norm, std::abs(stationary_exact(ModelParams(n, 1.0), hess).total() - 1.0));
    }
    out.push_back(within("exact_normalisation_max_error", norm, std::nullopt, 1e-10));

    double diff = 0.0;
    for (std::int64_t n : {50, 100, 300}) {
        const auto a = stationary_exact(ModelParams(n, 1.0));
        const auto b = stationary_exact(ModelParams(n, 1.0), hess);
        for (std::size_t k = 0; k < a.mass.size(); ++k) diff = std::max(diff, std::abs(a.mass[k] - b.mass[k]));
    }
    out.push_back(within("exact_dense_vs_hessenberg", diff, std::nullopt, 1e-9));

    double below = 0.0;
    for (std::int64_t n : {100, 200, 300}) {
        const ModelParams p(n, 1.0);
        below = std::max(below, stationary_exact(p, hess).mass_below(p.rho_c() * p.n() - 10.0 * p.window_scale()));
    }
    out.push_back(within("exact_mass_far_below_max", below, std::nullopt, 1e-3));

    const ModelParams p50(50, 1.0);
    out.push_back(within("exact_argmax_n50", static_cast<double>(stationary_exact(p50).argmax()), 25.0,
                         25.0 + 3.0 * p50.window_scale()));
    return out;
}

std::vector<Check> window(const WindowReport& report) {
    // The lower confidence bound must be strictly positive.
    Check lower = within("shift_lower_99", report.shift_lower_99, 0.0, std::nullopt);
    lower.passed = lower.passed && report.shift_lower_99 > 0.0;
    return {
        within("within_deviation_fraction", report.within_deviation_fraction, 1.0, std::nullopt),
        within("below_deviation_fraction", report.below_deviation_fraction, std::nullopt, 0.0),
        within("in_window_fraction", report.in_window_fraction, std::nullopt, std::nullopt),
        within("shift_estimate", report.shift_estimate, 0.2, 0.8),
        lower,
    };
}

std::vector<Check> stabilization_time(const Context& ctx, std::int64_t n_sites, std::int64_t runs, double delta) {
    const ModelParams p(n_sites, 1.0);
    const double threshold = delta * (1.0 + p.lambda) * p.n() * p.n();
    const auto cap = static_cast<std::int64_t>(std::ceil(threshold)) + 1;
    const auto exceeded = parallel_trials<int>(runs, ctx.threads, [&](std::int64_t i) {
        Stream rng(family_seed(ctx, kStabilization), static_cast<std::uint64_t>(i));
        const CountChainSampler sampler(p);
        std::int64_t t_abs = -1;
        run_chain(sampler, {p.n_sites, p.n_sites}, rng, cap, [&](std::int64_t t, CountState s) {
            if (s.y == 0) t_abs = t;
            return true;
        });
        return (t_abs < 0 || static_cast<double>(t_abs) > threshold) ? 1 : 0;
    });
    double frac = 0.0;
    for (int e : exceeded) frac += e;
    frac /= static_cast<double>(runs);
    return {within("stabilization_time_exceed_fraction", frac, std::nullopt, 0.05)};
}

std::vector<Check> drift(const Context& ctx) {
    std::vector<Check> out;

    std::int64_t sign_violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (double lam : kLambdas) {
        for (std::int64_t n : {100, 1000, 10000}) {
            const ModelParams p(n, lam);
            const std::int64_t xs = std::max<std::int64_t>(1, n / 100);
            for (std::int64_t x = 1; x <= n; x += xs) {
                const double floor_y = (1.0 + lam) * static_cast<double>(x) - lam * p.n() + 4.0 * lam + 2.0;
                const std::int64_t y0 = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(floor_y)) + 1);
                if (y0 > x) continue;
                const std::int64_t ys = std::max<std::int64_t>(1, (x - y0) / 50);
                for (std::int64_t y = y0; y <= x; y += ys) {
                    const double d = drift_exact(p, {x, y});
                    worst = std::max(worst, d);
                    if (!(d < 0.0)) ++sign_violations;
                }
            }
        }
    }
    out.push_back(within("drift_sign_violations", static_cast<double>(sign_violations), std::nullopt, 0.0));
    out.push_back(within("drift_max_above_threshold", worst, std::nullopt, 0.0));

    // Second-order MGF expansion: residual O(|theta|/N + |theta|^3) on window states.
    {
        const ModelParams p(10000, 1.0);
        const DeviationFrame frame(p);
        double scaled = 0.0;
        for (double b : {0.5, 1.0, 2.0}) {
            const std::int64_t x = window_x(p, b);
            for (double s : {-200.0, -50.0, 0.0, 50.0}) {
                const std::int64_t y = std::llround(frame.ell_at(static_cast<double>(x)) + s);
                if (y < 1 || y > x) continue;
                for (double th : {-0.1, -0.05, -0.01, 0.01, 0.05, 0.1}) {
                    const double res = std::abs(mgf_exact(p, {x, y}, th) - *mgf_expansion(p, {x, y}, th));
                    scaled = std::max(scaled, res / (std::abs(th) / p.n() + std::pow(std::abs(th), 3)));
                }
            }
        }
        out.push_back(within("mgf_expansion_scaled_residual", scaled, std::nullopt, 3.0));
        const std::int64_t x = window_x(p, 1.0);
        const std::int64_t y = std::llround(frame.ell_at(static_cast<double>(x)));
        const double r1 = std::abs(mgf_exact(p, {x, y}, 0.1) - *mgf_expansion(p, {x, y}, 0.1));
        const double r2 = std::abs(mgf_exact(p, {x, y}, 0.05) - *mgf_expansion(p, {x, y}, 0.05));
        out.push_back(within("mgf_expansion_cubic_ratio", r1 / r2, 6.0, 10.0));
    }

    // Var[dS] ~ 2 lambda near the critical line.
    {
        const ModelParams p(100000, 1.0);
        const DeviationFrame frame(p);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double b : {0.2, 0.5, 1.0}) {
            const std::int64_t x = window_x(p, b);
            for (double s : {-300.0, 0.0, 300.0}) {
                const std::int64_t y = std::llround(frame.ell_at(static_cast<double>(x)) + s);
                const double m2 = second_moment_exact(p, {x, y}) / p.lambda;
                lo = std::min(lo, m2);
                hi = std::max(hi, m2);
            }
        }
        out.push_back(within("window_second_moment_min", lo, 1.8, 2.2));
        out.push_back(within("window_second_moment_max", hi, 1.8, 2.2));
    }

    // exp(-h eps S) is a supermartingale in the lower band.
    {
        const ModelParams p(10000, 1.0);
        const DeviationFrame frame(p);
        double margin = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= 30; ++i) {
            const std::int64_t x = window_x(p, 0.1 * i);
            for (std::int64_t y = 1; y <= x; ++y) {
                if (!frame.in_lower_band({x, y})) continue;
                margin = std::min(margin, supermartingale_margin(p, {x, y}, 0.01, frame.eps_n));
            }
        }
        out.push_back(within("supermartingale_margin_min", margin, 0.0, std::nullopt));
    }

    // Lower deviations along trajectories from (N, N).
    {
        const ModelParams p(2000, 1.0);
        const DeviationFrame frame(p, 2.0 * default_eps_n(p));
        const CountChainSampler sampler(p);
        const std::int64_t runs = 100;
        const auto mins = parallel_trials<double>(runs, ctx.threads, [&](std::int64_t i) {
            Stream rng(family_seed(ctx, kDeviation), static_cast<std::uint64_t>(i));
            DeviationTracker tracker(frame);
            run_chain(sampler, {p.n_sites, p.n_sites}, rng, std::numeric_limits<std::int64_t>::max(),
                      [&](std::int64_t t, CountState s) {
                          tracker.observe(t, s);
                          return true;
                      });
            return tracker.result().min_s / (frame.eps_n * p.n());
        });
        double frac = 0.0, deepest = 0.0;
        for (double m : mins) {
            if (m < -2.0) frac += 1.0;
            deepest = std::min(deepest, m);
        }
        out.push_back(within("lower_deviation_fraction", frac / static_cast<double>(runs), std::nullopt, 0.05));
        out.push_back(within("lower_deviation_deepest_over_epsN", deepest, std::nullopt, std::nullopt));
    }
    return out;
}

std::vector<Check> coarse_grain(const Context& ctx) {
    std::vector<Check> out;
    const ModelParams p(10000, 1.0);
    const double a = p.shift_constant();

    double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin;
    double rem_lo = rmin, rem_hi = -rmin;
    for (std::int64_t k = 1; k <= 10; ++k) {
        const BandSpec band = band_parameters(p, k, 1.0);
        const TiltRoot root = theta_star(p, band);
        rmin = std::min(rmin, root.theta / root.prediction);
        rmax = std::max(rmax, root.theta / root.prediction);
        const double rem = (band.delta - band.delta_leading) * (1.0 + p.lambda) * (p.n() - static_cast<double>(band.y_star));
        rem_lo = std::min(rem_lo, rem);
        rem_hi = std::max(rem_hi, rem);
    }
    for (std::int64_t n : {1000, 100000}) {
        const ModelParams q(n, 1.0);
        for (std::int64_t k = 1; k <= 10; ++k) {
            const TiltRoot root = theta_star(q, band_parameters(q, k, 1.0));
            rmin = std::min(rmin, root.theta / root.prediction);
            rmax = std::max(rmax, root.theta / root.prediction);
        }
    }
    out.push_back(within("theta_star_ratio_min", rmin, 0.8, 1.2));
    out.push_back(within("theta_star_ratio_max", rmax, 0.8, 1.2));
    out.push_back(within("delta_floor_remainder_min", rem_lo, 0.0, 1.0));
    out.push_back(within("delta_floor_remainder_max", rem_hi, 0.0, 1.0));

    double ratio_err = 0.0;
    for (std::int64_t k = 0; k <= 5; ++k) {
        const double f = band_exit_probability(p, band_parameters(p, k, a));
        const double pred = predicted_exit_ratio(p, k);
        ratio_err = std::max(ratio_err, std::abs((1.0 - f) / f - pred) / pred);
    }
    out.push_back(within("exit_ratio_max_relative_error", ratio_err, std::nullopt, 0.1));

    const CoarseChain cc = build_coarse_chain(p, a);
    std::int64_t non_monotone = 0;
    for (std::size_t i = 1; i < cc.f.size(); ++i) {
        if (cc.f[i] > cc.f[i - 1]) ++non_monotone;
    }
    out.push_back(within("exit_probability_non_monotone", static_cast<double>(non_monotone), std::nullopt, 0.0));

    double resist = 0.0;
    auto compare_chain = [&](const BirthDeathChain& chain) {
        for (std::int64_t s = chain.bottom() + 1; s < chain.top(); ++s) {
            resist = std::max(resist, std::abs(hitting_probability(chain, s) - hitting_probability_linear(chain, s)));
        }
    };
    for (std::int64_t n : {1000, 10000}) {
        const ModelParams q(n, 1.0);
        for (double xh : {0.25, q.shift_constant(), 1.0}) compare_chain(build_coarse_chain(q, xh).chain);
    }
    for (double g : {0.3, 0.5, 0.7}) {
        for (std::int64_t k : {1, 5, 20, 50}) compare_chain(BirthDeathChain::uniform(k, k, g));
    }
    Stream syn(family_seed(ctx, kSyntheticChains), 0);
    for (int c = 0; c < 20; ++c) {
        std::vector<double> g(30);
        for (auto& v : g) v = 0.2 + 0.6 * syn.uniform();
        compare_chain(BirthDeathChain(-10, std::move(g)));
    }
    out.push_back(within("resistance_vs_linear_max_diff", resist, std::nullopt, 1e-10));

    {
        const BandSpec band = band_parameters(p, 2, 1.0);
        const StepLaw law = StepLaw::from_increment_law(increment_law(p, {band.x_anchor, band.y_star}));
        const TiltRoot root = theta_star(p, band);
        Stream rng(family_seed(ctx, kOptionalStopping), 0);
        const double mean = optional_stopping_mean(law, band.lattice_lower(), band.lattice_upper(),
                                                   std::llround(static_cast<double>(band.k) * band.width), root.theta,
                                                   100'000, rng);
        out.push_back(within("optional_stopping_mean", mean, 0.99, 1.01));
    }

    {
        const ModelParams q(1000, 1.0);
        double worst = 0.0;
        for (int i = -6; i <= 6; ++i) {
            const std::int64_t x = window_x(q, 0.5 * i);
            for (std::int64_t y = 1; y <= x; y += 7) {
                for (std::int64_t m = 0; m < 20; ++m) {
                    const double bound = large_jump_bound(q, {x, y}, m);
                    if (bound > 0.0) worst = std::max(worst, large_jump_tail(q, {x, y}, m) / bound);
                }
            }
        }
        out.push_back(within("large_jump_tail_over_bound", worst, std::nullopt, 1.0));
    }

    out.push_back(within("absorption_factor_at_a_error",
                         std::abs(absorption_exponent_factor(p, a) * std::sqrt(p.n()) - 1.0), std::nullopt, 1e-12));
    for (double xh : {0.25, a}) {
        const CoarseChain chain = build_coarse_chain(p, xh);
        const double hit = hitting_probability(chain.chain, 0);
        const double est = absorption_window_estimate(p, xh);
        out.push_back(within(xh == a ? "absorption_estimate_ratio_at_a" : "absorption_estimate_ratio_at_quarter",
                             hit / est, 0.1, 10.0));
    }
    return out;
}

std::vector<Check> scaling(const Context& ctx, const ScalingScale& scale) {
    std::vector<Check> out;
    const ModelParams p(100000, 1.0);

    RegressionOptions ro;
    ro.threads = ctx.threads;
    const DriftRegression reg = drift_regression(p, ro, family_seed(ctx, kRegression));
    out.push_back(within("rescaled_drift_coefficient", reg.drift_coefficient, -1.15, -0.85));
    out.push_back(within("rescaled_variance_coefficient", reg.variance_coefficient, 1.7, 2.3));

    Stream rng(family_seed(ctx, kOuMoments), 0);
    const OuMoments m = ou_moments(scale.ou_horizon, 1e-3, 1.0, scale.ou_paths, rng);
    out.push_back(within("ou_stationary_mean", m.mean, -0.02, 0.02));
    out.push_back(within("ou_stationary_variance", m.variance, 0.98, 1.02));
    out.push_back(within("ou_autocovariance_lag1", m.autocovariance, std::exp(-1.0) - 0.05, std::exp(-1.0) + 0.05));

    PassageOptions po;
    po.horizon = scale.passage_horizon;
    po.threads = ctx.threads;
    const PassageDichotomy d =
        first_passage_compare(p, 1.0, scale.passage_samples, family_seed(ctx, kPassage), po);
    out.push_back(within("passage_median_ratio", d.median_ratio, 5.0, std::nullopt));
    out.push_back(within("passage_fast_ks_statistic", d.fast.ks_statistic, std::nullopt, std::nullopt));

    // KS distance between chain and OU passage times at a fixed level should shrink with N.
    PassageOptions trend;
    trend.horizon = 10.0;
    trend.dt = 1e-4;
    trend.start_b = 1.0;
    trend.threads = ctx.threads;
    const double ks_small =
        passage_compare(ModelParams(10000, 1.0), 1.5, scale.trend_samples, family_seed(ctx, kPassageTrend), trend)
            .ks_statistic;
    const double ks_large =
        passage_compare(ModelParams(100000, 1.0), 1.5, scale.trend_samples, family_seed(ctx, kPassageTrend), trend)
            .ks_statistic;
    out.push_back(within("passage_ks_n1e4", ks_small, std::nullopt, std::nullopt));
    out.push_back(within("passage_ks_n1e5", ks_large, std::nullopt, std::nullopt));
    out.push_back(within("passage_ks_decrease", ks_small - ks_large, 0.0, std::nullopt));
    return out;
}

}  // namespace arw::checks
