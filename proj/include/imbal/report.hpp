#pragma once

// Uniform-versus-optimized comparison of one ISP, with per-minute traces
// laid out for plotting (battery power on top, FRR activation below).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imbal/optimizer.hpp"

namespace imbal {

struct MinuteTrace {
    int minute = 0;
    double battery_power_mw = 0.0;  // + = discharge
    double afrr_mw = 0.0;           // signed, + = upward
    double mfrr_mw = 0.0;
    double unserved_mw = 0.0;
    std::optional<double> afrr_marginal_price;
    std::optional<double> mfrr_marginal_price;
    bool mfrr_active = false;

    bool operator==(const MinuteTrace&) const = default;
};

/// Country-neutral view of a price breakdown. Belgian reports fill the
/// vwap/basis fields, Dutch reports the lambda/state fields.
struct PriceSummary {
    std::string rule;  // Belgian branch or Dutch regulation state
    std::optional<double> vwap_up;
    std::optional<double> vwap_down;
    std::optional<double> mfrr_marginal;
    std::optional<double> si_sign_basis;
    std::optional<double> lambda_up;
    std::optional<double> lambda_down;
    std::optional<double> lambda_mid;
    std::optional<int> regulation_state;
    bool fallback = false;

    bool operator==(const PriceSummary&) const = default;
};

struct StrategyOutcome {
    double imbalance_price = 0.0;
    double profit = 0.0;
    double position_mwh = 0.0;
    PriceSummary price;
    std::optional<int> mfrr_request_minute;
    std::optional<int> first_mfrr_delivery_minute;
    std::vector<MinuteTrace> trace;

    bool operator==(const StrategyOutcome&) const = default;
};

struct ComparisonReport {
    std::string scenario_id;
    std::string country;
    double requested_position_mwh = 0.0;
    double rounded_position_mwh = 0.0;
    double power_grid_step_mw = 0.0;
    std::vector<double> system_imbalance_mw;
    StrategyOutcome uniform;
    StrategyOutcome optimized;
    double profit_delta = 0.0;  // optimized - uniform
    double price_delta = 0.0;
    bool improved_on_uniform = false;
    bool budget_exhausted = false;

    bool operator==(const ComparisonReport&) const = default;
};

StrategyOutcome summarize(const DispatchProfile& profile, const SettlementResult& settlement);

ComparisonReport compare_strategies(const QuarterHourScenario& scenario, double position_mwh,
                                    const BessSpec& spec, const OptimizerConfig& config);

enum class ReportFormat { Json, Csv };

ReportFormat parse_report_format(std::string_view s);

/// JSON keeps every field; CSV is a tidy per-minute table followed by a
/// blank line and a `metric,uniform,optimized,delta` summary block.
std::string export_report(const ComparisonReport& report, ReportFormat format);

ComparisonReport parse_report_json(std::string_view text);

/// One strategy on its own, same layout as a report half.
std::string export_outcome(const StrategyOutcome& outcome, std::string_view scenario_id,
                           const std::vector<double>& system_imbalance, ReportFormat format);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

}  // namespace imbal
