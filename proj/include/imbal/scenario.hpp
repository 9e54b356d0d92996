#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imbal/market_core.hpp"

namespace imbal {

enum class Country { Belgium, Netherlands };

std::string_view to_string(Country c);
/// Accepts "be"/"nl" (case-insensitive); throws SchemaError otherwise.
Country parse_country(std::string_view s);

/// The exogenous world of one imbalance settlement period.
struct QuarterHourScenario {
    std::string id;
    Country country = Country::Belgium;
    int isp_length_minutes = 15;
    double dt_hours = 1.0 / 60.0;
    std::vector<double> si_trace;  // MW per minute, + = surplus
    LadderSet ladders;
    MfrrPolicy mfrr_policy;
    double initial_soc = 0.5;
    /// Nominated BRP position for the ISP, when the file carries one.
    std::optional<double> position_mwh;

    /// Throws ValidationError naming the first broken invariant.
    void validate() const;

    bool operator==(const QuarterHourScenario&) const = default;
};

}  // namespace imbal
