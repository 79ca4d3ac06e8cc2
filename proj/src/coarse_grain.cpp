#include "arw/coarse_grain.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace arw {

namespace {

constexpr std::int64_t kMaxLattice = 1'000'000;

double band_width(const ModelParams& p) { return std::pow(p.n(), 3.0 / 8.0); }

std::int64_t log_sq(const ModelParams& p) {
    const double l = std::log(p.n());
    return static_cast<std::int64_t>(std::floor(l * l));
}

struct Anchor {
    std::int64_t x = 0;
    double x_hat = 0.0;
};

Anchor anchor_for(const ModelParams& p, double x_hat, bool barred) {
    const double w = p.window_scale();
    std::int64_t x = std::llround(p.rho_c() * p.n() + x_hat * w);
    if (barred) x -= log_sq(p);
    if (x < 0 || x > p.n_sites) {
        throw DomainError("band anchor x=" + std::to_string(x) + " outside [0, N]");
    }
    return {x, (static_cast<double>(x) - p.rho_c() * p.n()) / w};
}

double log_sum_exp(std::span<const double> v) {
    const double m = *std::max_element(v.begin(), v.end());
    double acc = 0.0;
    for (double t : v) acc += std::exp(t - m);
    return m + std::log(acc);
}

}  // namespace

// ---------------------------------------------------------------- StepLaw

StepLaw StepLaw::from_increment_law(const IncrementLaw& law, double tail_cut) {
    const auto pmf = law.delta_y_pmf();  // pmf[j] = P[dY = j - 1]
    StepLaw s;
    s.up = pmf[0];
    s.down.assign(pmf.begin() + 1, pmf.end());
    if (tail_cut > 0.0) {
        double acc = s.up;
        std::size_t keep = 0;
        for (; keep < s.down.size(); ++keep) {
            acc += s.down[keep];
            if (acc >= 1.0 - tail_cut) break;
        }
        if (keep + 1 < s.down.size()) {
            const double dropped =
                std::accumulate(s.down.begin() + static_cast<std::ptrdiff_t>(keep) + 1, s.down.end(), 0.0);
            s.down.resize(keep + 1);
            s.down.back() += dropped;
        }
    }
    return s;
}

StepLaw StepLaw::plus_minus_one(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("plus_minus_one requires 0 < p < 1");
    return {p, {0.0, 1.0 - p}};
}

double StepLaw::total() const { return std::accumulate(down.begin(), down.end(), up); }

double StepLaw::mean() const {
    double m = up;
    for (std::size_t j = 1; j < down.size(); ++j) m -= static_cast<double>(j) * down[j];
    return m;
}

double StepLaw::mgf_minus_one(double theta) const {
    double acc = up * std::expm1(theta);
    for (std::size_t j = 1; j < down.size(); ++j) acc += down[j] * std::expm1(-theta * static_cast<double>(j));
    return acc;
}

std::int64_t StepLaw::sample(Stream& rng) const {
    double u = rng.uniform();
    if (u < up) return 1;
    u -= up;
    for (std::size_t j = 0; j < down.size(); ++j) {
        if (u < down[j]) return -static_cast<std::int64_t>(j);
        u -= down[j];
    }
    return -max_down();
}

// ---------------------------------------------------------------- bands

std::int64_t BandSpec::lattice_lower() const { return static_cast<std::int64_t>(std::floor(lower)); }
std::int64_t BandSpec::lattice_upper() const { return static_cast<std::int64_t>(std::ceil(upper)); }

std::int64_t band_k_minus(const ModelParams& params) {
    return static_cast<std::int64_t>(std::floor(std::pow(params.n(), 1.0 / 8.0)));
}

std::int64_t band_k_plus(const ModelParams& params, double x_hat, bool barred) {
    const Anchor a = anchor_for(params, x_hat, barred);
    const double v = (1.0 + params.lambda) * a.x_hat * std::pow(params.n(), 1.0 / 8.0) *
                     std::sqrt(std::log(params.n()));
    return static_cast<std::int64_t>(std::floor(v));
}

std::int64_t band_top_usable(const ModelParams& params, double x_hat, bool barred) {
    const Anchor a = anchor_for(params, x_hat, barred);
    const double w = params.window_scale();
    const double l = band_width(params);
    const double shift = barred ? -1.5 : 1.5;
    std::int64_t k = band_k_plus(params, x_hat, barred);
    const std::int64_t k_minus = band_k_minus(params);
    while (k >= -k_minus) {
        const double y = std::floor((1.0 + params.lambda) * a.x_hat * w - (static_cast<double>(k) + shift) * l);
        if (y >= 1.0) break;
        --k;
    }
    return k;
}

BandSpec band_parameters(const ModelParams& params, std::int64_t k, double x_hat, bool barred) {
    params.validate();
    BandSpec b;
    b.k = k;
    b.barred = barred;
    b.x_hat = x_hat;
    b.k_minus = band_k_minus(params);
    b.k_plus = band_k_plus(params, x_hat, barred);
    if (k < -b.k_minus || k > b.k_plus) {
        throw DomainError("band index " + std::to_string(k) + " outside [" + std::to_string(-b.k_minus) +
                          ", " + std::to_string(b.k_plus) + "]");
    }

    const Anchor a = anchor_for(params, x_hat, barred);
    const double n = params.n();
    const double lam = params.lambda;
    b.width = band_width(params);
    b.lower = static_cast<double>(k - 1) * b.width;
    b.upper = static_cast<double>(k + 1) * b.width;
    b.x_anchor = a.x;
    b.x_hat_anchor = a.x_hat;
    b.z_star = (static_cast<double>(k) + (barred ? -1.5 : 1.5)) * b.width;
    const double y = std::floor((1.0 + lam) * a.x_hat * params.window_scale() - b.z_star);
    if (y < 0.0 || y > static_cast<double>(a.x)) {
        throw DomainError("band " + std::to_string(k) + ": y*=" + std::to_string(y) + " outside [0, " +
                          std::to_string(a.x) + "]");
    }
    b.y_star = static_cast<std::int64_t>(y);
    const double ys = static_cast<double>(b.y_star);
    b.delta = (static_cast<double>(a.x) - ys) / (n - ys) - params.rho_c();
    b.delta_leading = b.z_star / ((1.0 + lam) * (n - ys));
    return b;
}

// ---------------------------------------------------------------- tilt

TiltRoot tilt_root(const StepLaw& law, double prediction) {
    TiltRoot r;
    r.prediction = prediction;
    const double drift = law.mean();
    if (std::abs(drift) <= 1e-15) {
        r.degenerate = true;
        return r;
    }
    if (prediction == 0.0 || (prediction > 0.0) != (drift < 0.0)) {
        // phi - 1 has slope `drift` at 0; the nontrivial root lies on the side where phi dips.
        throw std::runtime_error("drift too small to separate roots");
    }

    auto g = [&](double t) { return law.mgf_minus_one(t); };
    // Bracket [inner, outer] with g(inner) < 0 < g(outer).
    const double floor_mag = 1e-3 * std::abs(prediction);
    double inner = 0.5 * prediction;
    double outer = 1.5 * prediction;
    for (int i = 0; i < 200 && !(g(inner) < 0.0); ++i) {
        inner *= 0.5;
        if (std::abs(inner) < floor_mag) throw std::runtime_error("drift too small to separate roots");
    }
    for (int i = 0; i < 200 && !(g(outer) > 0.0); ++i) outer *= 2.0;
    if (!(g(inner) < 0.0) || !(g(outer) > 0.0)) throw std::runtime_error("drift too small to separate roots");

    double lo = std::min(inner, outer);
    double hi = std::max(inner, outer);
    const auto tol = [](double a, double b) { return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(a); };
    const auto [a, b] = boost::math::tools::bisect(g, lo, hi, tol);
    r.theta = 0.5 * (a + b);
    r.residual = g(r.theta);
    return r;
}

TiltRoot theta_star(const ModelParams& params, const BandSpec& band) {
    const IncrementLaw law = increment_law(params, {band.x_anchor, band.y_star});
    const StepLaw step = StepLaw::from_increment_law(law, 0.0);
    return tilt_root(step, (1.0 + params.lambda) / params.lambda * band.delta);
}

// ---------------------------------------------------------------- exits

std::vector<double> exit_probabilities(const StepLaw& law, std::int64_t lower, std::int64_t upper) {
    if (upper - lower < 2) throw DomainError("exit interval has no interior points");
    if (upper - lower - 1 > kMaxLattice) throw DomainError("exit interval exceeds 10^6 lattice points");
    const auto n = static_cast<std::size_t>(upper - lower - 1);
    const auto w = static_cast<std::size_t>(std::max<std::int64_t>(law.max_down(), 0));

    // Row i holds columns i-w .. i+1 at offsets 0 .. w+1.
    const std::size_t span = w + 2;
    std::vector<double> band(n * span, 0.0);
    std::vector<double> rhs(n, 0.0);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return band[i * span + (j + w - i)]; };

    for (std::size_t i = 0; i < n; ++i) {
        at(i, i) = 1.0 - (law.down.empty() ? 0.0 : law.down[0]);
        if (i + 1 < n) {
            at(i, i + 1) = -law.up;
        } else {
            rhs[i] = law.up;
        }
        for (std::size_t j = 1; j <= w && j <= i; ++j) at(i, i - j) = -law.down[j];
    }

    // Row-diagonally dominant band with upper bandwidth one: eliminate without pivoting.
    for (std::size_t j = 0; j < n; ++j) {
        const double piv = at(j, j);
        for (std::size_t i = j + 1; i < n && i <= j + w; ++i) {
            double& e = at(i, j);
            if (e == 0.0) continue;
            const double f = e / piv;
            e = 0.0;
            if (j + 1 < n) at(i, j + 1) -= f * at(j, j + 1);
            rhs[i] -= f * rhs[j];
        }
    }
    std::vector<double> h(n);
    for (std::size_t j = n; j-- > 0;) {
        const double next = j + 1 < n ? at(j, j + 1) * h[j + 1] : 0.0;
        h[j] = std::clamp((rhs[j] - next) / at(j, j), 0.0, 1.0);
    }
    return h;
}

double exit_probability_exact(const StepLaw& law, std::int64_t lower, std::int64_t upper, std::int64_t start) {
    if (start <= lower || start >= upper) throw DomainError("start must lie strictly inside the interval");
    return exit_probabilities(law, lower, upper)[static_cast<std::size_t>(start - lower - 1)];
}

double band_exit_probability(const ModelParams& params, const BandSpec& band, StartRule rule) {
    const IncrementLaw law = increment_law(params, {band.x_anchor, band.y_star});
    const StepLaw step = StepLaw::from_increment_law(law);
    const std::int64_t lo = band.lattice_lower();
    const std::int64_t hi = band.lattice_upper();
    const auto h = exit_probabilities(step, lo, hi);
    const double centre = static_cast<double>(band.k) * band.width;

    auto index_of = [&](std::int64_t z) { return static_cast<std::size_t>(std::clamp(z, lo + 1, hi - 1) - lo - 1); };
    if (rule == StartRule::Center) return h[index_of(std::llround(centre))];

    const auto m2 = 2 * log_sq(params);
    const auto first = index_of(static_cast<std::int64_t>(std::ceil(centre)) - m2);
    const auto last = index_of(static_cast<std::int64_t>(std::floor(centre)) + m2);
    return *std::max_element(h.begin() + static_cast<std::ptrdiff_t>(first),
                             h.begin() + static_cast<std::ptrdiff_t>(last) + 1);
}

double predicted_exit_ratio(const ModelParams& params, std::int64_t k, bool barred) {
    const double shift = barred ? -1.5 : 1.5;
    return std::exp((static_cast<double>(k) + shift) / (params.lambda * std::pow(params.n(), 0.25)));
}

double optional_stopping_mean(const StepLaw& law, std::int64_t lower, std::int64_t upper,
                              std::int64_t start, double theta, std::int64_t runs, Stream& rng) {
    if (start <= lower || start >= upper) throw DomainError("start must lie strictly inside the interval");
    if (runs < 1) throw DomainError("runs must be positive");
    double acc = 0.0;
    for (std::int64_t r = 0; r < runs; ++r) {
        std::int64_t z = start;
        while (z > lower && z < upper) z += law.sample(rng);
        acc += std::exp(theta * static_cast<double>(z - start));
    }
    return acc / static_cast<double>(runs);
}

// ---------------------------------------------------------------- birth-death

BirthDeathChain::BirthDeathChain(std::int64_t lowest, std::vector<double> g) : lowest_(lowest), g_(std::move(g)) {
    if (g_.empty()) throw DomainError("birth-death chain needs at least one interior state");
    for (double v : g_) {
        if (!(v > 0.0 && v < 1.0)) throw DomainError("up-probabilities must lie in (0, 1)");
    }
}

BirthDeathChain BirthDeathChain::uniform(std::int64_t k_minus, std::int64_t k_plus, double g) {
    return {-k_minus, std::vector<double>(static_cast<std::size_t>(k_plus + k_minus + 1), g)};
}

double BirthDeathChain::g(std::int64_t k) const {
    if (k < lowest_ || k > highest()) throw DomainError("state outside the chain interior");
    return g_[static_cast<std::size_t>(k - lowest_)];
}

std::vector<double> birth_death_log_resistance(const BirthDeathChain& chain) {
    const auto& g = chain.up_probabilities();
    std::vector<double> out(g.size() + 1);
    out[0] = 0.0;  // empty product at k = bottom
    for (std::size_t j = 0; j < g.size(); ++j) out[j + 1] = out[j] + std::log1p(-g[j]) - std::log(g[j]);
    return out;
}

std::vector<double> birth_death_resistance(const BirthDeathChain& chain) {
    auto out = birth_death_log_resistance(chain);
    for (double& v : out) v = std::exp(v);
    return out;
}

double hitting_probability(const BirthDeathChain& chain, std::int64_t start) {
    if (start <= chain.bottom() || start >= chain.top()) throw DomainError("start must be an interior state");
    const auto log_r = birth_death_log_resistance(chain);
    const auto cut = static_cast<std::size_t>(start - chain.bottom());
    const double num = log_sum_exp(std::span<const double>(log_r.data(), cut));
    const double den = log_sum_exp(log_r);
    return std::exp(num - den);
}

double hitting_probability_linear(const BirthDeathChain& chain, std::int64_t start) {
    if (start <= chain.bottom() || start >= chain.top()) throw DomainError("start must be an interior state");
    // h_k = g_k h_{k+1} + (1-g_k) h_{k-1}, h_bottom = 0, h_top = 1 (Thomas algorithm).
    const auto& g = chain.up_probabilities();
    const std::size_t n = g.size();
    std::vector<double> c(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sub = i > 0 ? -(1.0 - g[i]) : 0.0;
        const double sup = i + 1 < n ? -g[i] : 0.0;
        const double r = i + 1 < n ? 0.0 : g[i];
        const double denom = 1.0 - sub * (i > 0 ? c[i - 1] : 0.0);
        c[i] = sup / denom;
        d[i] = (r - sub * (i > 0 ? d[i - 1] : 0.0)) / denom;
    }
    std::vector<double> h(n);
    for (std::size_t i = n; i-- > 0;) h[i] = d[i] - (i + 1 < n ? c[i] * h[i + 1] : 0.0);
    return h[static_cast<std::size_t>(start - chain.lowest())];
}

CoarseChain build_coarse_chain(const ModelParams& params, double x_hat, StartRule rule) {
    const std::int64_t k_minus = band_k_minus(params);
    const std::int64_t k_top = band_top_usable(params, x_hat);
    if (k_top < -k_minus) throw DomainError("no usable band at this x_hat");
    std::vector<BandSpec> bands;
    std::vector<double> f;
    for (std::int64_t k = -k_minus; k <= k_top; ++k) {
        bands.push_back(band_parameters(params, k, x_hat));
        f.push_back(band_exit_probability(params, bands.back(), rule));
    }
    BirthDeathChain chain(-k_minus, f);
    return {std::move(bands), std::move(f), std::move(chain)};
}

double absorption_exponent_factor(const ModelParams& params, double x_hat) {
    const double lam = params.lambda;
    return std::exp(-(1.0 + lam) * (1.0 + lam) * x_hat * x_hat * std::log(params.n()) / (2.0 * lam));
}

double absorption_window_estimate(const ModelParams& params, double x_hat) {
    if (!(x_hat > 0.0)) throw DomainError("absorption_window_estimate requires x_hat > 0");
    return x_hat * std::sqrt(std::log(params.n())) * absorption_exponent_factor(params, x_hat);
}

double large_jump_tail(const ModelParams& params, CountState state, std::int64_t m) {
    if (m < -1) return 1.0;
    const auto tail = increment_law(params, state).delta_y_tail();  // tail[j] = P[dY >= j-1]
    const auto idx = static_cast<std::size_t>(m + 2);
    return idx < tail.size() ? tail[idx] : 0.0;
}

double large_jump_bound(const ModelParams& params, CountState state, std::int64_t m) {
    const double ratio = static_cast<double>(state.x) / (params.n() + 2.0);
    return 2.0 / (1.0 + params.lambda) * std::pow(ratio, static_cast<double>(m + 1));
}

}  // namespace arw
