#pragma once

// Site-level simulators on the complete graph K_{N+1} (N internal vertices,
// vertex N is the wired boundary).
//
//  * eta_step: one update of the single-occupancy chain, in which the chosen
//    active particle walks until it settles on an empty vertex or exits.
//  * stabilize_driven / DrivenChain: the driven chain, which adds a particle at
//    a uniform vertex and relaxes with ordinary activated-random-walk moves,
//    allowing several active particles per vertex.

#include "arw/count_chain.hpp"
#include "arw/model.hpp"
#include "arw/rng.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace arw {

enum class SiteKind : std::uint8_t { Empty, Sleeping, Active };

struct Site {
    std::int32_t active = 0;  // active particles on the vertex
    bool sleeping = false;    // only possible when active == 0

    static constexpr Site empty() { return {}; }
    static constexpr Site sleeper() { return {0, true}; }
    static constexpr Site with_active(std::int32_t n) { return {n, false}; }

    SiteKind kind() const {
        if (sleeping) return SiteKind::Sleeping;
        return active > 0 ? SiteKind::Active : SiteKind::Empty;
    }
    std::int32_t particles() const { return sleeping ? 1 : active; }
    bool operator==(const Site&) const = default;
};

struct MicroConfig {
    std::vector<Site> sites;

    static MicroConfig all_empty(std::int64_t n);
    static MicroConfig all_active(std::int64_t n);
    static MicroConfig all_sleeping(std::int64_t n);

    std::int64_t size() const { return static_cast<std::int64_t>(sites.size()); }
    std::int64_t particle_count() const;
    std::int64_t active_count() const;
    bool stable() const { return active_count() == 0; }
    bool single_occupancy() const;
    bool operator==(const MicroConfig&) const = default;
};

/// (X, Y) of a single-occupancy configuration; multi-occupancy is a domain error.
CountState count_projection(const MicroConfig& config);

/// In-place eta update; returns the induced count outcome.
StepOutcome eta_step_in_place(const ModelParams& params, MicroConfig& config, Stream& rng);

std::pair<MicroConfig, StepOutcome> eta_step(const ModelParams& params, MicroConfig config,
                                             Stream& rng);

/// Which active particle acts next during stabilization.
enum class SelectionRule : std::uint8_t {
    Uniform,        // uniform over active particles (embedded continuous-time clocks)
    LowestSiteFirst // always a particle on the lowest-indexed active vertex
};

struct StabilizeOptions {
    SelectionRule rule = SelectionRule::Uniform;
    std::int64_t max_updates = 1'000'000'000;
};

/// Relaxes every active particle of `config`; returns the number of micro-updates.
/// Throws TruncationError when `max_updates` is exceeded.
std::int64_t stabilize_in_place(const ModelParams& params, MicroConfig& config, Stream& rng,
                                const StabilizeOptions& options = {});

/// Adds an active particle at `addition_site` of a stable configuration (waking a
/// sleeper there) and stabilizes. Returns the stable configuration and the number
/// of micro-updates.
std::pair<MicroConfig, std::int64_t> stabilize_driven(const ModelParams& params, MicroConfig config,
                                                      std::int64_t addition_site, Stream& rng,
                                                      const StabilizeOptions& options = {});

struct DrivenSample {
    std::int64_t step_index = 0;
    std::int64_t particle_count = 0;
    std::int64_t avalanche_steps = 0;
};

/// The driven chain as a stateful object: one addition per `advance`.
class DrivenChain {
public:
    DrivenChain(const ModelParams& params, MicroConfig initial, StabilizeOptions options = {});

    DrivenSample advance(Stream& rng);
    const MicroConfig& config() const { return config_; }
    std::int64_t steps_taken() const { return steps_; }

private:
    ModelParams params_;
    MicroConfig config_;
    StabilizeOptions options_;
    std::int64_t particles_ = 0;
    std::int64_t steps_ = 0;
};

/// `steps` additions at uniform vertices starting from a stable `initial`.
std::vector<DrivenSample> driven_chain_run(const ModelParams& params, MicroConfig initial,
                                           std::int64_t steps, Stream& rng);

}  // namespace arw
