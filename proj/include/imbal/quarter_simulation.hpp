#pragma once

#include <optional>
#include <vector>

#include "imbal/battery.hpp"
#include "imbal/market_core.hpp"
#include "imbal/scenario.hpp"

namespace imbal {

struct QuarterClearing {
    std::vector<MinuteClearing> minutes;

    /// Sum over minutes of SI_t minus BRP net consumption (MW·min).
    double total_system_imbalance = 0.0;
    double average_system_imbalance = 0.0;
    bool any_mfrr = false;
    std::optional<int> mfrr_request_minute;
    std::optional<int> first_mfrr_delivery_minute;

    /// Cheapest upward and highest downward aFRR offer of the ISP.
    std::optional<double> afrr_up_best_price;
    std::optional<double> afrr_down_best_price;

    bool operator==(const QuarterClearing&) const = default;
};

/// Clears every minute of the ISP in order, carrying the mFRR request state.
/// Errors from a minute surface as VolumeExceedsLadder tagged with it.
QuarterClearing simulate_quarter(const QuarterHourScenario& scenario, const DispatchProfile& profile,
                                 const MfrrPolicy& policy);

inline QuarterClearing simulate_quarter(const QuarterHourScenario& scenario,
                                        const DispatchProfile& profile) {
    return simulate_quarter(scenario, profile, scenario.mfrr_policy);
}

}  // namespace imbal
