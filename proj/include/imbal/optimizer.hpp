#pragma once

// Upper-level search: the BRP picks a per-minute battery dispatch with a
// fixed ISP position to maximize imbalance revenue, with the market and
// pricing rules as the lower level.

#include <cstddef>
#include <cstdint>
#include <optional>

#include "imbal/battery.hpp"
#include "imbal/scenario.hpp"
#include "imbal/settlement.hpp"

namespace imbal {

enum class SearchMode { DpGrid, Exhaustive };

struct OptimizerConfig {
    double power_grid_step = 0.5;    // MW between admissible per-minute powers
    std::optional<Country> country;  // defaults to the scenario's country
    SearchMode search_mode = SearchMode::DpGrid;
    std::size_t max_nodes = 20'000'000;

    void validate(const BessSpec& spec) const;
};

/// Discretization of the per-minute power and of the ISP position.
struct PowerGrid {
    double step = 0.5;
    int levels_per_side = 0;  // powers are k*step for k in [-levels_per_side, levels_per_side]
    int target_level_sum = 0;
    double rounded_position_mwh = 0.0;
};

/// Throws ValidationError if the step does not divide the power rating and
/// PowerInfeasible if the rounded position is out of reach.
PowerGrid make_power_grid(const BessSpec& spec, double step, double position_mwh, int isp_minutes);

struct OptimizationResult {
    DispatchProfile profile;
    SettlementResult settlement;
    double requested_position_mwh = 0.0;
    double rounded_position_mwh = 0.0;
    /// The uniform incumbent was beaten by a strictly better grid profile.
    bool improved_on_uniform = false;
    /// The node budget ran out; `profile` is the best found so far.
    bool budget_exhausted = false;
    /// Search labels expanded, or profiles enumerated by the exhaustive oracle.
    std::size_t nodes = 0;
};

/// Best dispatch over the grid profiles plus the uniform profile, all with
/// the grid-rounded position. Ties keep the uniform profile.
OptimizationResult optimize_dispatch(const QuarterHourScenario& scenario, double position_mwh,
                                     const BessSpec& spec, const OptimizerConfig& config);

inline constexpr std::uint64_t kMaxEnumeratedProfiles = 10'000'000;

/// Enumerates every grid profile; same feasible set as optimize_dispatch.
/// Throws EnumerationTooLarge beyond kMaxEnumeratedProfiles candidates.
OptimizationResult brute_force_oracle(const QuarterHourScenario& scenario, double position_mwh,
                                      const BessSpec& spec, double grid_step,
                                      std::optional<Country> country = std::nullopt);

}  // namespace imbal
