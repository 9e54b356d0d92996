#include "imbal/report.hpp"

#include <array>
#include <charconv>
#include <sstream>

#include <json.hpp>

#include "imbal/errors.hpp"

namespace imbal {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

namespace {

PriceSummary price_summary(const SettlementResult& s) {
    PriceSummary p;
    if (const auto* be = std::get_if<BelgianPriceBreakdown>(&s.breakdown)) {
        p.rule = std::string(to_string(be->branch));
        p.vwap_up = be->vwap_up;
        p.vwap_down = be->vwap_down;
        p.mfrr_marginal = be->mfrr_marginal;
        p.si_sign_basis = be->si_sign_basis;
        p.fallback = be->vwap_fallback;
    } else {
        const auto& nl = std::get<DutchPriceBreakdown>(s.breakdown);
        p.rule = "state_" + std::to_string(static_cast<int>(nl.state));
        p.lambda_up = nl.lambda_up;
        p.lambda_down = nl.lambda_down;
        p.lambda_mid = nl.lambda_mid;
        p.regulation_state = static_cast<int>(nl.state);
        p.fallback = nl.mid_fallback;
    }
    return p;
}

template <class T>
ordered_json opt(const std::optional<T>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

template <class T>
std::optional<T> opt_get(const json& j, const char* key) {
    const json& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<T>();
}

ordered_json outcome_json(const StrategyOutcome& o) {
    ordered_json j;
    j["imbalance_price"] = o.imbalance_price;
    j["profit"] = o.profit;
    j["position_mwh"] = o.position_mwh;
    const PriceSummary& p = o.price;
    j["price"] = {{"rule", p.rule},
                  {"vwap_up", opt(p.vwap_up)},
                  {"vwap_down", opt(p.vwap_down)},
                  {"mfrr_marginal", opt(p.mfrr_marginal)},
                  {"si_sign_basis", opt(p.si_sign_basis)},
                  {"lambda_up", opt(p.lambda_up)},
                  {"lambda_down", opt(p.lambda_down)},
                  {"lambda_mid", opt(p.lambda_mid)},
                  {"regulation_state", opt(p.regulation_state)},
                  {"fallback", p.fallback}};
    j["mfrr_request_minute"] = opt(o.mfrr_request_minute);
    j["first_mfrr_delivery_minute"] = opt(o.first_mfrr_delivery_minute);
    ordered_json trace = ordered_json::array();
    for (const auto& m : o.trace) {
        trace.push_back({{"minute", m.minute},
                         {"battery_power_mw", m.battery_power_mw},
                         {"afrr_mw", m.afrr_mw},
                         {"mfrr_mw", m.mfrr_mw},
                         {"unserved_mw", m.unserved_mw},
                         {"afrr_marginal_price", opt(m.afrr_marginal_price)},
                         {"mfrr_marginal_price", opt(m.mfrr_marginal_price)},
                         {"mfrr_active", m.mfrr_active}});
    }
    j["trace"] = std::move(trace);
    return j;
}

StrategyOutcome outcome_from_json(const json& j) {
    StrategyOutcome o;
    o.imbalance_price = j.at("imbalance_price").get<double>();
    o.profit = j.at("profit").get<double>();
    o.position_mwh = j.at("position_mwh").get<double>();
    const json& p = j.at("price");
    o.price.rule = p.at("rule").get<std::string>();
    o.price.vwap_up = opt_get<double>(p, "vwap_up");
    o.price.vwap_down = opt_get<double>(p, "vwap_down");
    o.price.mfrr_marginal = opt_get<double>(p, "mfrr_marginal");
    o.price.si_sign_basis = opt_get<double>(p, "si_sign_basis");
    o.price.lambda_up = opt_get<double>(p, "lambda_up");
    o.price.lambda_down = opt_get<double>(p, "lambda_down");
    o.price.lambda_mid = opt_get<double>(p, "lambda_mid");
    o.price.regulation_state = opt_get<int>(p, "regulation_state");
    o.price.fallback = p.at("fallback").get<bool>();
    o.mfrr_request_minute = opt_get<int>(j, "mfrr_request_minute");
    o.first_mfrr_delivery_minute = opt_get<int>(j, "first_mfrr_delivery_minute");
    for (const json& m : j.at("trace")) {
        MinuteTrace t;
        t.minute = m.at("minute").get<int>();
        t.battery_power_mw = m.at("battery_power_mw").get<double>();
        t.afrr_mw = m.at("afrr_mw").get<double>();
        t.mfrr_mw = m.at("mfrr_mw").get<double>();
        t.unserved_mw = m.at("unserved_mw").get<double>();
        t.afrr_marginal_price = opt_get<double>(m, "afrr_marginal_price");
        t.mfrr_marginal_price = opt_get<double>(m, "mfrr_marginal_price");
        t.mfrr_active = m.at("mfrr_active").get<bool>();
        o.trace.push_back(t);
    }
    return o;
}

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::string export_csv(const ComparisonReport& r) {
    std::ostringstream os;
    os << "minute,system_imbalance_mw,"
          "uniform_power_mw,uniform_afrr_mw,uniform_mfrr_mw,uniform_unserved_mw,"
          "uniform_afrr_marginal,uniform_mfrr_marginal,uniform_mfrr_active,"
          "optimized_power_mw,optimized_afrr_mw,optimized_mfrr_mw,optimized_unserved_mw,"
          "optimized_afrr_marginal,optimized_mfrr_marginal,optimized_mfrr_active\n";
    for (std::size_t t = 0; t < r.uniform.trace.size(); ++t) {
        os << t << ',' << format_number(r.system_imbalance_mw.at(t));
        for (const StrategyOutcome* o : {&r.uniform, &r.optimized}) {
            const MinuteTrace& m = o->trace.at(t);
            os << ',' << format_number(m.battery_power_mw) << ',' << format_number(m.afrr_mw) << ','
               << format_number(m.mfrr_mw) << ',' << format_number(m.unserved_mw) << ','
               << cell(m.afrr_marginal_price) << ',' << cell(m.mfrr_marginal_price) << ','
               << (m.mfrr_active ? 1 : 0);
        }
        os << '\n';
    }
    os << '\n' << "metric,uniform,optimized,delta\n";
    os << "imbalance_price_eur_mwh," << format_number(r.uniform.imbalance_price) << ','
       << format_number(r.optimized.imbalance_price) << ',' << format_number(r.price_delta) << '\n';
    os << "profit_eur," << format_number(r.uniform.profit) << ','
       << format_number(r.optimized.profit) << ',' << format_number(r.profit_delta) << '\n';
    os << "position_mwh," << format_number(r.uniform.position_mwh) << ','
       << format_number(r.optimized.position_mwh) << ",0\n";
    os << "price_rule," << r.uniform.price.rule << ',' << r.optimized.price.rule << ",\n";
    return os.str();
}

}  // namespace

StrategyOutcome summarize(const DispatchProfile& profile, const SettlementResult& s) {
    StrategyOutcome o;
    o.imbalance_price = s.imbalance_price;
    o.profit = s.profit;
    o.position_mwh = s.position_mwh;
    o.price = price_summary(s);
    o.mfrr_request_minute = s.clearing.mfrr_request_minute;
    o.first_mfrr_delivery_minute = s.clearing.first_mfrr_delivery_minute;
    const auto power = profile.net_injection();
    for (std::size_t t = 0; t < s.clearing.minutes.size(); ++t) {
        const MinuteClearing& c = s.clearing.minutes[t];
        o.trace.push_back({c.minute, power.at(t), c.afrr_volume, c.mfrr_volume, c.unserved_volume,
                           c.afrr_marginal_price, c.mfrr_marginal_price, c.mfrr_active});
    }
    return o;
}

ComparisonReport compare_strategies(const QuarterHourScenario& scenario, double position_mwh,
                                    const BessSpec& spec, const OptimizerConfig& config) {
    const OptimizationResult opt = optimize_dispatch(scenario, position_mwh, spec, config);
    const DispatchProfile uniform =
        uniform_profile(opt.rounded_position_mwh, spec, scenario.isp_length_minutes);
    const SettlementResult uniform_settled =
        evaluate_dispatch(scenario, uniform, config.country.value_or(scenario.country));

    ComparisonReport r;
    r.scenario_id = scenario.id;
    r.country = std::string(to_string(config.country.value_or(scenario.country)));
    r.requested_position_mwh = opt.requested_position_mwh;
    r.rounded_position_mwh = opt.rounded_position_mwh;
    r.power_grid_step_mw = config.power_grid_step;
    r.system_imbalance_mw = scenario.si_trace;
    r.uniform = summarize(uniform, uniform_settled);
    r.optimized = summarize(opt.profile, opt.settlement);
    r.profit_delta = r.optimized.profit - r.uniform.profit;
    r.price_delta = r.optimized.imbalance_price - r.uniform.imbalance_price;
    r.improved_on_uniform = opt.improved_on_uniform;
    r.budget_exhausted = opt.budget_exhausted;
    return r;
}

ReportFormat parse_report_format(std::string_view s) {
    if (s == "json") return ReportFormat::Json;
    if (s == "csv") return ReportFormat::Csv;
    throw SchemaError("format", "expected json or csv, got '" + std::string(s) + "'");
}

std::string export_report(const ComparisonReport& r, ReportFormat format) {
    if (format == ReportFormat::Csv) return export_csv(r);
    ordered_json j;
    j["report_version"] = 1;
    j["scenario_id"] = r.scenario_id;
    j["country"] = r.country;
    j["requested_position_mwh"] = r.requested_position_mwh;
    j["rounded_position_mwh"] = r.rounded_position_mwh;
    j["power_grid_step_mw"] = r.power_grid_step_mw;
    j["system_imbalance_mw"] = r.system_imbalance_mw;
    j["profit_delta"] = r.profit_delta;
    j["price_delta"] = r.price_delta;
    j["improved_on_uniform"] = r.improved_on_uniform;
    j["budget_exhausted"] = r.budget_exhausted;
    j["uniform"] = outcome_json(r.uniform);
    j["optimized"] = outcome_json(r.optimized);
    return j.dump(2) + "\n";
}

ComparisonReport parse_report_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(1, e.byte, e.what());
    }
    try {
        ComparisonReport r;
        r.scenario_id = j.at("scenario_id").get<std::string>();
        r.country = j.at("country").get<std::string>();
        r.requested_position_mwh = j.at("requested_position_mwh").get<double>();
        r.rounded_position_mwh = j.at("rounded_position_mwh").get<double>();
        r.power_grid_step_mw = j.at("power_grid_step_mw").get<double>();
        r.system_imbalance_mw = j.at("system_imbalance_mw").get<std::vector<double>>();
        r.profit_delta = j.at("profit_delta").get<double>();
        r.price_delta = j.at("price_delta").get<double>();
        r.improved_on_uniform = j.at("improved_on_uniform").get<bool>();
        r.budget_exhausted = j.at("budget_exhausted").get<bool>();
        r.uniform = outcome_from_json(j.at("uniform"));
        r.optimized = outcome_from_json(j.at("optimized"));
        return r;
    } catch (const json::exception& e) {
        throw SchemaError("report", e.what());
    }
}

std::string export_outcome(const StrategyOutcome& o, std::string_view scenario_id,
                           const std::vector<double>& si, ReportFormat format) {
    if (format == ReportFormat::Json) {
        ordered_json j;
        j["scenario_id"] = std::string(scenario_id);
        j["system_imbalance_mw"] = si;
        j["outcome"] = outcome_json(o);
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "minute,system_imbalance_mw,power_mw,afrr_mw,mfrr_mw,unserved_mw,afrr_marginal,"
          "mfrr_marginal,mfrr_active\n";
    for (std::size_t t = 0; t < o.trace.size(); ++t) {
        const MinuteTrace& m = o.trace[t];
        os << t << ',' << format_number(si.at(t)) << ',' << format_number(m.battery_power_mw)
           << ',' << format_number(m.afrr_mw) << ',' << format_number(m.mfrr_mw) << ','
           << format_number(m.unserved_mw) << ',' << cell(m.afrr_marginal_price) << ','
           << cell(m.mfrr_marginal_price) << ',' << (m.mfrr_active ? 1 : 0) << '\n';
    }
    os << "\nmetric,value\n";
    os << "imbalance_price_eur_mwh," << format_number(o.imbalance_price) << '\n';
    os << "profit_eur," << format_number(o.profit) << '\n';
    os << "position_mwh," << format_number(o.position_mwh) << '\n';
    os << "price_rule," << o.price.rule << '\n';
    return os.str();
}

}  // namespace imbal
