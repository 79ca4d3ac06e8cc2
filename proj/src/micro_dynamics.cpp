#include "arw/micro_dynamics.hpp"

#include <algorithm>
#include <string>

namespace arw {

namespace {

void require_size(const ModelParams& params, const MicroConfig& config) {
    if (config.size() != params.n_sites) {
        throw DomainError("configuration has " + std::to_string(config.size()) +
                          " sites, expected N=" + std::to_string(params.n_sites));
    }
}

// Uniform vertex of K_{N+1} other than `from`; the value N denotes the boundary.
std::int64_t jump_target(std::int64_t n, std::int64_t from, Stream& rng) {
    auto j = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
    return j >= from ? j + 1 : j;
}

}  // namespace

MicroConfig MicroConfig::all_empty(std::int64_t n) {
    return {std::vector<Site>(static_cast<std::size_t>(n), Site::empty())};
}

MicroConfig MicroConfig::all_active(std::int64_t n) {
    return {std::vector<Site>(static_cast<std::size_t>(n), Site::with_active(1))};
}

MicroConfig MicroConfig::all_sleeping(std::int64_t n) {
    return {std::vector<Site>(static_cast<std::size_t>(n), Site::sleeper())};
}

std::int64_t MicroConfig::particle_count() const {
    std::int64_t total = 0;
    for (const auto& s : sites) total += s.particles();
    return total;
}

std::int64_t MicroConfig::active_count() const {
    std::int64_t total = 0;
    for (const auto& s : sites) total += s.active;
    return total;
}

bool MicroConfig::single_occupancy() const {
    return std::all_of(sites.begin(), sites.end(), [](const Site& s) { return s.active <= 1; });
}

CountState count_projection(const MicroConfig& config) {
    CountState c;
    for (const auto& s : config.sites) {
        if (s.active > 1) throw DomainError("count projection undefined with multi-occupancy");
        if (s.kind() != SiteKind::Empty) ++c.x;
        if (s.kind() == SiteKind::Active) ++c.y;
    }
    return c;
}

StepOutcome eta_step_in_place(const ModelParams& params, MicroConfig& config, Stream& rng) {
    require_size(params, config);
    const std::int64_t n = params.n_sites;

    std::int64_t active = 0;
    for (const auto& s : config.sites) {
        if (s.active > 1) throw DomainError("eta_step requires single occupancy");
        active += s.active;
    }
    if (active == 0) throw DomainError("eta_step: no active particle");

    // Uniform active vertex.
    auto pick = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(active)));
    std::int64_t origin = 0;
    for (; origin < n; ++origin) {
        if (config.sites[static_cast<std::size_t>(origin)].active == 1 && pick-- == 0) break;
    }

    auto& home = config.sites[static_cast<std::size_t>(origin)];
    if (rng.uniform() < params.sleep_probability()) {
        home = Site::sleeper();
        return StepOutcome::sleep();
    }

    home = Site::empty();
    std::int64_t woken = 0;
    std::int64_t at = origin;
    for (;;) {
        const std::int64_t target = jump_target(n, at, rng);
        if (target == n) return StepOutcome::exit(woken);
        auto& site = config.sites[static_cast<std::size_t>(target)];
        switch (site.kind()) {
            case SiteKind::Empty:
                site = Site::with_active(1);
                return StepOutcome::settle(woken);
            case SiteKind::Sleeping:
                site = Site::with_active(1);
                ++woken;
                break;
            case SiteKind::Active:
                break;
        }
        at = target;
    }
}

std::pair<MicroConfig, StepOutcome> eta_step(const ModelParams& params, MicroConfig config,
                                             Stream& rng) {
    const StepOutcome o = eta_step_in_place(params, config, rng);
    return {std::move(config), o};
}

std::int64_t stabilize_in_place(const ModelParams& params, MicroConfig& config, Stream& rng,
                                const StabilizeOptions& options) {
    require_size(params, config);
    const std::int64_t n = params.n_sites;
    const double sleep_p = params.sleep_probability();

    // One entry per active particle: the vertex it sits on.
    std::vector<std::int64_t> particles;
    for (std::int64_t v = 0; v < n; ++v) {
        for (std::int32_t c = 0; c < config.sites[static_cast<std::size_t>(v)].active; ++c) {
            particles.push_back(v);
        }
    }

    auto remove = [&](std::size_t i) {
        particles[i] = particles.back();
        particles.pop_back();
    };

    std::int64_t updates = 0;
    while (!particles.empty()) {
        if (updates >= options.max_updates) {
            throw TruncationError("stabilization exceeded " + std::to_string(options.max_updates) +
                                  " micro-updates");
        }
        ++updates;

        std::size_t i = 0;
        if (options.rule == SelectionRule::Uniform) {
            i = static_cast<std::size_t>(rng.below(particles.size()));
        } else {
            i = static_cast<std::size_t>(
                std::min_element(particles.begin(), particles.end()) - particles.begin());
        }
        const std::int64_t from = particles[i];
        auto& origin = config.sites[static_cast<std::size_t>(from)];

        if (rng.uniform() < sleep_p) {
            // A sleep attempt only succeeds for a lone particle.
            if (origin.active == 1) {
                origin = Site::sleeper();
                remove(i);
            }
            continue;
        }

        const std::int64_t to = jump_target(n, from, rng);
        --origin.active;
        if (to == n) {
            remove(i);
            continue;
        }
        auto& dest = config.sites[static_cast<std::size_t>(to)];
        if (dest.sleeping) {
            dest = Site::with_active(1);
            particles.push_back(to);
        }
        ++dest.active;
        particles[i] = to;
    }
    return updates;
}

std::pair<MicroConfig, std::int64_t> stabilize_driven(const ModelParams& params, MicroConfig config,
                                                      std::int64_t addition_site, Stream& rng,
                                                      const StabilizeOptions& options) {
    require_size(params, config);
    if (addition_site < 0 || addition_site >= params.n_sites) {
        throw DomainError("addition site " + std::to_string(addition_site) + " out of range");
    }
    if (!config.stable()) throw DomainError("stabilize_driven requires a stable configuration");

    auto& site = config.sites[static_cast<std::size_t>(addition_site)];
    site = Site::with_active(site.sleeping ? 2 : 1);
    const std::int64_t updates = stabilize_in_place(params, config, rng, options);
    return {std::move(config), updates};
}

DrivenChain::DrivenChain(const ModelParams& params, MicroConfig initial, StabilizeOptions options)
    : params_(params), config_(std::move(initial)), options_(options) {
    require_size(params_, config_);
    if (!config_.stable()) throw DomainError("driven chain requires a stable initial configuration");
    particles_ = config_.particle_count();
}

DrivenSample DrivenChain::advance(Stream& rng) {
    const auto v = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(params_.n_sites)));
    auto& site = config_.sites[static_cast<std::size_t>(v)];
    site = Site::with_active(site.sleeping ? 2 : 1);
    const std::int64_t updates = stabilize_in_place(params_, config_, rng, options_);
    particles_ = config_.particle_count();
    return {steps_++, particles_, updates};
}

std::vector<DrivenSample> driven_chain_run(const ModelParams& params, MicroConfig initial,
                                           std::int64_t steps, Stream& rng) {
    DrivenChain chain(params, std::move(initial));
    std::vector<DrivenSample> out;
    out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(steps, 0)));
    for (std::int64_t s = 0; s < steps; ++s) out.push_back(chain.advance(rng));
    return out;
}

}  // namespace arw
