#pragma once

#include <variant>

#include "imbal/battery.hpp"
#include "imbal/pricing_be.hpp"
#include "imbal/pricing_nl.hpp"
#include "imbal/quarter_simulation.hpp"
#include "imbal/scenario.hpp"

namespace imbal {

struct SettlementResult {
    Country country = Country::Belgium;
    double imbalance_price = 0.0;  // EUR/MWh faced by the BRP
    double position_mwh = 0.0;
    double profit = 0.0;           // EUR, price * position
    std::variant<BelgianPriceBreakdown, DutchPriceBreakdown> breakdown;
    QuarterClearing clearing;
};

/// Clears the ISP for `profile` and settles the BRP position under the
/// country's imbalance pricing rules.
SettlementResult evaluate_dispatch(const QuarterHourScenario& scenario,
                                   const DispatchProfile& profile, Country country);

inline SettlementResult evaluate_dispatch(const QuarterHourScenario& scenario,
                                          const DispatchProfile& profile) {
    return evaluate_dispatch(scenario, profile, scenario.country);
}

}  // namespace imbal
