#include "arw/scaling_limit.hpp"

#include "arw/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace arw {

namespace {

// Stream families, so that chain and OU samples never share a stream.
constexpr std::uint64_t kSlow = 0x51;
constexpr std::uint64_t kFast = 0xFA;
constexpr std::uint64_t kChain = 0xC4;
constexpr std::uint64_t kOu = 0x0D;

void require_dt(double dt) {
    if (!(dt > 0.0 && dt <= 1e-2)) throw DomainError("OU step dt must lie in (0, 1e-2]");
}

double ell(const ModelParams& p, double x) { return (1.0 + p.lambda) * x - p.lambda * p.n(); }

PassageTime chain_passage(const ModelParams& params, const CountChainSampler& sampler, CountState start,
                          double level, double horizon, Stream& rng) {
    const double threshold = level * std::sqrt(params.lambda * params.n());
    const double lam = params.lambda;
    const double nl = params.lambda * params.n();
    const auto max_steps = static_cast<std::int64_t>(std::ceil(horizon * params.n()));
    std::int64_t hit = -1;
    run_chain(sampler, start, rng, max_steps, [&](std::int64_t t, CountState s) {
        const double dev = static_cast<double>(s.y) - ((1.0 + lam) * static_cast<double>(s.x) - nl);
        if (dev <= threshold) {
            hit = t;
            return false;
        }
        return true;
    });
    if (hit < 0) return {horizon, true};
    return {static_cast<double>(hit) / params.n(), false};
}

}  // namespace

CriticalConstants critical_constants(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive and finite");
    return {lambda / (1.0 + lambda), std::sqrt(lambda) / (1.0 + lambda)};
}

RescaledPath rescale_trajectory(const ModelParams& params, std::span<const TrajectoryPoint> path,
                                std::int64_t t0, double horizon) {
    const auto it = std::find_if(path.begin(), path.end(), [t0](const TrajectoryPoint& p) { return p.t == t0; });
    if (it == path.end()) throw DomainError("t0=" + std::to_string(t0) + " is not a recorded time");

    RescaledPath out;
    const double n = params.n();
    const double scale = std::sqrt(params.lambda * n);
    const double offset = std::abs(static_cast<double>(it->x) - params.rho_c() * n) / params.window_scale();
    out.off_window = !(offset >= 0.1 && offset <= 10.0);
    for (auto p = it; p != path.end(); ++p) {
        const double s = static_cast<double>(p->t - t0) / n;
        if (s > horizon) break;
        const double dev = static_cast<double>(p->y) - ell(params, static_cast<double>(p->x));
        out.samples.push_back({s, dev / scale});
    }
    out.empty_window = out.samples.size() < 2;
    return out;
}

std::vector<double> ou_simulate(double horizon, double dt, Stream& rng, double r0) {
    require_dt(dt);
    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
    const double noise = std::sqrt(2.0 * dt);
    std::vector<double> r(steps + 1);
    r[0] = r0;
    for (std::size_t i = 1; i <= steps; ++i) r[i] = r[i - 1] - r[i - 1] * dt + noise * rng.normal();
    return r;
}

OuMoments ou_moments(double horizon, double dt, double lag, std::int64_t paths, Stream& rng) {
    require_dt(dt);
    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
    const auto lag_steps = static_cast<std::size_t>(std::llround(lag / dt));
    const double noise = std::sqrt(2.0 * dt);

    double sum = 0.0, sum_sq = 0.0, sum_lag = 0.0;
    std::int64_t count = 0, count_lag = 0;
    std::vector<double> ring(lag_steps + 1);
    for (std::int64_t p = 0; p < paths; ++p) {
        double r = rng.normal();
        for (std::size_t i = 0; i <= steps; ++i) {
            if (i > 0) r += -r * dt + noise * rng.normal();
            sum += r;
            sum_sq += r * r;
            ++count;
            ring[i % ring.size()] = r;
            if (i >= lag_steps) {
                sum_lag += r * ring[(i - lag_steps) % ring.size()];
                ++count_lag;
            }
        }
    }
    OuMoments m;
    m.samples = count;
    m.mean = sum / static_cast<double>(count);
    m.variance = sum_sq / static_cast<double>(count) - m.mean * m.mean;
    m.autocovariance = count_lag > 0 ? sum_lag / static_cast<double>(count_lag) - m.mean * m.mean : 0.0;
    return m;
}

PassageTime ou_first_passage(double level, double horizon, double dt, Stream& rng, double r0) {
    require_dt(dt);
    if (r0 <= level) return {0.0, false};
    const auto steps = static_cast<std::int64_t>(std::llround(horizon / dt));
    const double noise = std::sqrt(2.0 * dt);
    double r = r0;
    for (std::int64_t i = 1; i <= steps; ++i) {
        r += -r * dt + noise * rng.normal();
        if (r <= level) return {static_cast<double>(i) * dt, false};
    }
    return {horizon, true};
}

double ks_statistic(std::span<const PassageTime> a, std::span<const PassageTime> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_statistic needs two non-empty samples");
    auto finite = [](std::span<const PassageTime> v) {
        std::vector<double> t;
        for (const auto& p : v) {
            if (!p.censored) t.push_back(p.time);
        }
        std::sort(t.begin(), t.end());
        return t;
    };
    const auto ta = finite(a);
    const auto tb = finite(b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < ta.size() || j < tb.size()) {
        const double v = j >= tb.size() || (i < ta.size() && ta[i] <= tb[j]) ? ta[i] : tb[j];
        while (i < ta.size() && ta[i] <= v) ++i;
        while (j < tb.size() && tb[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double median_time(std::span<const PassageTime> v) {
    if (v.empty()) throw DomainError("median of an empty sample");
    std::vector<double> t;
    t.reserve(v.size());
    for (const auto& p : v) t.push_back(p.censored ? std::numeric_limits<double>::infinity() : p.time);
    std::sort(t.begin(), t.end());
    const std::size_t m = t.size() / 2;
    return t.size() % 2 == 1 ? t[m] : 0.5 * (t[m - 1] + t[m]);
}

PassageComparison passage_compare(const ModelParams& params, double level, std::int64_t samples,
                                  std::uint64_t seed, const PassageOptions& options) {
    params.validate();
    if (samples < 1) throw DomainError("passage comparison needs at least one sample");
    require_dt(options.dt);
    if (level < 0.0) throw DomainError("passage level must be nonnegative");
    const CriticalConstants cc = critical_constants(params.lambda);
    const double b = options.start_b > 0.0 ? options.start_b : cc.a + options.epsilon + 0.1;
    const double coef = (1.0 + params.lambda) * std::sqrt(std::log(params.n())) / std::sqrt(params.lambda);
    if (level >= b * coef) throw DomainError("start_b must place Y = 0 below the passage level");
    const std::int64_t x0 = std::llround(cc.rho_c * params.n() + b * params.window_scale());
    if (x0 > params.n_sites) throw DomainError("start_b places the chain above N");
    const std::int64_t y0 = std::clamp<std::int64_t>(std::llround(ell(params, static_cast<double>(x0))), 1, x0);
    const CountState start{x0, y0};
    const double r0 = (static_cast<double>(y0) - ell(params, static_cast<double>(x0))) /
                      std::sqrt(params.lambda * params.n());

    const CountChainSampler sampler(params);
    PassageComparison c;
    c.level = level;
    c.chain = parallel_trials<PassageTime>(samples, options.threads, [&](std::int64_t i) {
        Stream rng(derive_seed(seed, kChain), static_cast<std::uint64_t>(i));
        return chain_passage(params, sampler, start, -level, options.horizon, rng);
    });
    c.ou = parallel_trials<PassageTime>(samples, options.threads, [&](std::int64_t i) {
        Stream rng(derive_seed(seed, kOu), static_cast<std::uint64_t>(i));
        return ou_first_passage(-level, options.horizon, options.dt, rng, r0);
    });
    c.ks_statistic = ks_statistic(c.chain, c.ou);
    c.median_chain = median_time(c.chain);
    c.median_ou = median_time(c.ou);
    return c;
}

PassageDichotomy first_passage_compare(const ModelParams& params, double level_multiplier,
                                       std::int64_t samples, std::uint64_t seed,
                                       const PassageOptions& options) {
    params.validate();
    const CriticalConstants cc = critical_constants(params.lambda);
    const double eps = options.epsilon;
    if (!(eps > 0.0 && eps < cc.a)) throw DomainError("epsilon must lie in (0, a)");
    if (level_multiplier < 0.0) throw DomainError("level multiplier must be nonnegative");
    if (samples < 100) throw DomainError("first_passage_compare needs at least 100 samples");

    const double coef = (1.0 + params.lambda) * std::sqrt(std::log(params.n())) / std::sqrt(params.lambda);
    PassageDichotomy d;
    d.slow = passage_compare(params, level_multiplier * coef * (cc.a + eps), samples, derive_seed(seed, kSlow), options);
    d.fast = passage_compare(params, level_multiplier * coef * (cc.a - eps), samples, derive_seed(seed, kFast), options);

    double num = d.slow.median_chain;
    double den = d.fast.median_chain;
    if (!std::isfinite(num)) {
        num = options.horizon;
        d.ratio_is_lower_bound = true;
    }
    if (!std::isfinite(den)) den = options.horizon;
    d.median_ratio = (num == 0.0 && den == 0.0) ? 1.0 : num / den;
    return d;
}

DriftRegression drift_regression(const ModelParams& params, const RegressionOptions& options,
                                 std::uint64_t seed) {
    params.validate();
    if (options.trajectories < 1 || options.steps_per_trajectory < 1) {
        throw DomainError("drift_regression needs positive trajectory counts");
    }
    constexpr double kRange = 16.0;
    const auto nbins = static_cast<std::size_t>(std::ceil(2.0 * kRange / options.bin_width));

    struct Bin {
        std::int64_t n = 0;
        double r = 0.0, d = 0.0, q = 0.0;
    };
    using Bins = std::vector<Bin>;

    const double n = params.n();
    const double lam = params.lambda;
    const double scale = std::sqrt(lam * n);
    const std::int64_t x0 = std::llround(params.rho_c() * n + options.start_b * params.window_scale());
    if (x0 > params.n_sites) throw DomainError("start_b places the chain above N");
    const CountChainSampler sampler(params);

    const auto per_trial = parallel_trials<Bins>(options.trajectories, options.threads, [&](std::int64_t i) {
        Stream rng(seed, static_cast<std::uint64_t>(i));
        Bins bins(nbins);
        const double r0 = options.r0_min + (options.r0_max - options.r0_min) * rng.uniform();
        const double line = ell(params, static_cast<double>(x0));
        const std::int64_t y0 = std::clamp<std::int64_t>(std::llround(line + r0 * scale), 1, x0);
        CountState s{x0, y0};
        double dev = static_cast<double>(s.y) - line;
        for (std::int64_t t = 0; t < options.steps_per_trajectory && s.y > 0; ++t) {
            const StepOutcome o = sampler.draw(s, rng);
            const double ds = o.ds(lam);
            const double r = dev / scale;
            const double idx = std::floor((r + kRange) / options.bin_width);
            if (idx >= 0.0 && idx < static_cast<double>(nbins)) {
                Bin& b = bins[static_cast<std::size_t>(idx)];
                ++b.n;
                b.r += r;
                b.d += ds * std::sqrt(n / lam);
                b.q += ds * ds / lam;
            }
            s = o.apply(s);
            dev += ds;
        }
        return bins;
    });

    Bins total(nbins);
    for (const auto& bins : per_trial) {
        for (std::size_t k = 0; k < nbins; ++k) {
            total[k].n += bins[k].n;
            total[k].r += bins[k].r;
            total[k].d += bins[k].d;
            total[k].q += bins[k].q;
        }
    }

    // Weighted least squares of bin-mean drift on bin-mean R, weights = counts.
    constexpr std::int64_t kMinCount = 100;
    double w = 0.0, sx = 0.0, sy = 0.0;
    DriftRegression out;
    for (const auto& b : total) {
        out.steps += b.n;
        if (b.n < kMinCount) continue;
        const double cnt = static_cast<double>(b.n);
        w += cnt;
        sx += b.r;
        sy += b.d;
        ++out.bins_used;
    }
    if (out.bins_used < 2) throw std::runtime_error("drift_regression: too few populated bins");
    const double mx = sx / w;
    const double my = sy / w;
    double sxx = 0.0, sxy = 0.0, var_acc = 0.0;
    for (const auto& b : total) {
        if (b.n < kMinCount) continue;
        const double cnt = static_cast<double>(b.n);
        const double bx = b.r / cnt;
        const double by = b.d / cnt;
        sxx += cnt * (bx - mx) * (bx - mx);
        sxy += cnt * (bx - mx) * (by - my);
        var_acc += cnt * (b.q / cnt - by * by / n);
    }
    out.drift_coefficient = sxy / sxx;
    out.intercept = my - out.drift_coefficient * mx;
    out.variance_coefficient = var_acc / w;
    return out;
}

}  // namespace arw
