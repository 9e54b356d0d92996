#include "imbal/quarter_simulation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "imbal/errors.hpp"

namespace imbal {

std::string_view to_string(Country c) {
    return c == Country::Belgium ? "be" : "nl";
}

Country parse_country(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (lower == "be" || lower == "belgium") return Country::Belgium;
    if (lower == "nl" || lower == "netherlands") return Country::Netherlands;
    throw SchemaError("country", "expected 'be' or 'nl', got '" + std::string(s) + "'");
}

void QuarterHourScenario::validate() const {
    if (isp_length_minutes <= 0) {
        throw ValidationError("isp_length", "isp_length_minutes must be positive");
    }
    if (static_cast<int>(si_trace.size()) != isp_length_minutes) {
        throw ValidationError("si_trace_length",
                              "si_trace has " + std::to_string(si_trace.size()) +
                                  " entries, ISP has " + std::to_string(isp_length_minutes) +
                                  " minutes");
    }
    for (std::size_t t = 0; t < si_trace.size(); ++t) {
        if (!std::isfinite(si_trace[t])) {
            throw ValidationError("si_trace_finite", "minute " + std::to_string(t));
        }
    }
    if (!(dt_hours > 0.0)) throw ValidationError("dt_hours", "must be positive");
    if (!(initial_soc >= 0.0 && initial_soc <= 1.0)) {
        throw ValidationError("initial_soc", "must lie in [0, 1]");
    }
    if (position_mwh && !std::isfinite(*position_mwh)) {
        throw ValidationError("position_mwh", "must be finite");
    }
    ladders.validate();
    mfrr_policy.validate(isp_length_minutes);
}

QuarterClearing simulate_quarter(const QuarterHourScenario& scenario, const DispatchProfile& profile,
                                 const MfrrPolicy& policy) {
    const int n = scenario.isp_length_minutes;
    if (static_cast<int>(profile.size()) != n || static_cast<int>(scenario.si_trace.size()) != n) {
        throw std::invalid_argument("simulate_quarter: profile and SI trace must span the ISP");
    }

    QuarterClearing q;
    q.minutes.reserve(static_cast<std::size_t>(n));
    q.afrr_up_best_price = scenario.ladders.afrr_up.best_price();
    q.afrr_down_best_price = scenario.ladders.afrr_down.best_price();

    MfrrLatch latch;
    for (int t = 0; t < n; ++t) {
        const auto idx = static_cast<std::size_t>(t);
        MinuteState state{t, scenario.si_trace[idx], profile.steps[idx].net_consumption()};
        MinuteStep step = clear_minute_in_quarter(state, scenario.ladders, policy, latch);
        if (latch.phase == MfrrLatch::Phase::Idle && step.next.phase != MfrrLatch::Phase::Idle) {
            q.mfrr_request_minute = t;
        }
        latch = step.next;
        q.any_mfrr = q.any_mfrr || step.clearing.mfrr_active;
        if (!q.first_mfrr_delivery_minute && std::abs(step.clearing.mfrr_volume) > kVolumeTolerance) {
            q.first_mfrr_delivery_minute = t;
        }
        q.total_system_imbalance += state.system_imbalance - state.brp_net_consumption;
        q.minutes.push_back(std::move(step.clearing));
    }
    q.average_system_imbalance = q.total_system_imbalance / n;
    return q;
}

}  // namespace imbal
