#include "imbal/cli.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "imbal/errors.hpp"
#include "imbal/report.hpp"
#include "imbal/scenario_io.hpp"

namespace imbal {

namespace {

struct Options {
    std::string scenario_path;
    std::string si_trace_path;
    std::string profile_path;
    double position_mwh = 0.0;
    std::string country;
    double grid_step = 0.5;
    std::size_t max_nodes = OptimizerConfig{}.max_nodes;
    double power_mw = 10.0;
    double energy_mwh = 20.0;
    double round_trip = 0.9;
    double initial_soc = 0.5;
    std::string archetype;
    std::uint64_t seed = 0;
    double sweep_from = 0.0;
    double sweep_to = 0.0;
    double sweep_step = 0.25;
    std::string format = "json";
    std::string out_path;
    bool json_errors = false;

    bool has_position = false;
    bool has_initial_soc = false;
    bool has_sweep_from = false;
    bool has_sweep_to = false;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error("Usage", ErrorCategory::Validation, what) {}
};

int exit_code(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::Validation: return 2;
    case ErrorCategory::Infeasible: return 3;
    case ErrorCategory::Internal: return 1;
    }
    return 1;
}

std::string_view category_name(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::Validation: return "validation";
    case ErrorCategory::Infeasible: return "infeasible";
    case ErrorCategory::Internal: return "internal";
    }
    return "internal";
}

void report_error(std::ostream& err, bool as_json, const std::string& code, std::string_view category,
                  const std::string& message, int exit, const nlohmann::ordered_json& extra = {}) {
    if (!as_json) {
        err << "error [" << code << "]: " << message << '\n';
        return;
    }
    nlohmann::ordered_json body;
    body["code"] = code;
    body["category"] = std::string(category);
    body["message"] = message;
    body["exit_code"] = exit;
    if (extra.is_object()) {
        for (const auto& [k, v] : extra.items()) body[k] = v;
    }
    err << nlohmann::ordered_json{{"error", body}}.dump() << '\n';
}

nlohmann::ordered_json error_details(const Error& e) {
    nlohmann::ordered_json d = nlohmann::ordered_json::object();
    if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
        d["line"] = p->line();
        d["column"] = p->column();
    } else if (const auto* s = dynamic_cast<const SchemaError*>(&e)) {
        d["field"] = s->field();
    } else if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
        d["invariant"] = v->invariant();
    } else if (const auto* x = dynamic_cast<const VolumeExceedsLadder*>(&e)) {
        d["minute"] = x->minute();
        d["ladder"] = x->ladder();
    }
    return d;
}

QuarterHourScenario load_inputs(const Options& o) {
    if (o.scenario_path.empty()) throw UsageError("--scenario is required for this subcommand");
    QuarterHourScenario s = load_scenario(o.scenario_path);
    if (!o.si_trace_path.empty()) s.si_trace = load_si_trace_csv(o.si_trace_path);
    if (!o.country.empty()) s.country = parse_country(o.country);
    if (o.has_initial_soc) s.initial_soc = o.initial_soc;
    s.validate();
    return s;
}

BessSpec battery(const Options& o) {
    BessSpec spec = BessSpec::with_round_trip(o.power_mw, o.energy_mwh, o.round_trip);
    spec.validate();
    return spec;
}

OptimizerConfig optimizer_config(const Options& o) {
    OptimizerConfig c;
    c.power_grid_step = o.grid_step;
    c.max_nodes = o.max_nodes;
    return c;
}

double position(const Options& o, const QuarterHourScenario& s) {
    if (o.has_position) return o.position_mwh;
    if (s.position_mwh) return *s.position_mwh;
    throw UsageError("no position: pass --position-mwh or add position_mwh to the scenario");
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
    if (o.out_path.empty()) {
        out << text;
    } else {
        write_text_file(o.out_path, text);
    }
}

void cmd_simulate(const Options& o, std::ostream& out) {
    const QuarterHourScenario s = load_inputs(o);
    BessSpec spec = battery(o);
    spec.dt_hours = s.dt_hours;
    DispatchProfile profile;
    if (!o.profile_path.empty()) {
        profile = DispatchProfile::from_net_injection(parse_profile_csv(read_text_file(o.profile_path)));
        if (static_cast<int>(profile.size()) != s.isp_length_minutes) {
            throw ValidationError("profile_length", "profile has " + std::to_string(profile.size()) +
                                                        " minutes, ISP has " +
                                                        std::to_string(s.isp_length_minutes));
        }
    } else {
        const double p = o.has_position || s.position_mwh ? position(o, s) : 0.0;
        profile = uniform_profile(p, spec, s.isp_length_minutes);
    }
    if (auto v = check_feasible(profile, s.initial_soc, spec)) {
        std::ostringstream os;
        os << "profile violates " << to_string(v->constraint) << " at minute " << v->minute
           << " (value " << v->value << ")";
        throw PowerInfeasible(os.str());
    }
    const SettlementResult r = evaluate_dispatch(s, profile);
    emit(o, out, export_outcome(summarize(profile, r), s.id, s.si_trace, parse_report_format(o.format)));
}

void cmd_optimize(const Options& o, std::ostream& out) {
    const QuarterHourScenario s = load_inputs(o);
    const OptimizationResult r = optimize_dispatch(s, position(o, s), battery(o), optimizer_config(o));
    emit(o, out,
         export_outcome(summarize(r.profile, r.settlement), s.id, s.si_trace,
                        parse_report_format(o.format)));
}

void cmd_compare(const Options& o, std::ostream& out) {
    const QuarterHourScenario s = load_inputs(o);
    const ComparisonReport r = compare_strategies(s, position(o, s), battery(o), optimizer_config(o));
    emit(o, out, export_report(r, parse_report_format(o.format)));
}

void cmd_gen_fixture(const Options& o, std::ostream& out) {
    if (o.archetype.empty()) throw UsageError("--archetype is required");
    emit(o, out, scenario_to_json(generate_strategy_fixture(parse_archetype(o.archetype), o.seed)));
}

void cmd_sweep(const Options& o, std::ostream& out) {
    const QuarterHourScenario s = load_inputs(o);
    const BessSpec spec = battery(o);
    const OptimizerConfig config = optimizer_config(o);
    const ReportFormat format = parse_report_format(o.format);
    const double reach = spec.power_max * s.isp_length_minutes * s.dt_hours;
    const double from = o.has_sweep_from ? o.sweep_from : -reach;
    const double to = o.has_sweep_to ? o.sweep_to : reach;
    if (!(o.sweep_step > 0.0) || !(to >= from)) {
        throw UsageError("sweep needs --step-mwh > 0 and --to-mwh >= --from-mwh");
    }
    const auto count = std::llround(std::floor((to - from) / o.sweep_step + 1e-9)) + 1;

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    std::ostringstream csv;
    csv << "position_mwh,rounded_position_mwh,uniform_profit_eur,optimized_profit_eur,"
           "optimized_price_eur_mwh,status\n";
    for (long long i = 0; i < count; ++i) {
        const double p = from + static_cast<double>(i) * o.sweep_step;
        nlohmann::ordered_json row;
        row["position_mwh"] = p;
        try {
            const ComparisonReport r = compare_strategies(s, p, spec, config);
            row["rounded_position_mwh"] = r.rounded_position_mwh;
            row["uniform_profit_eur"] = r.uniform.profit;
            row["optimized_profit_eur"] = r.optimized.profit;
            row["optimized_price_eur_mwh"] = r.optimized.imbalance_price;
            row["status"] = "ok";
            csv << format_number(p) << ',' << format_number(r.rounded_position_mwh) << ','
                << format_number(r.uniform.profit) << ',' << format_number(r.optimized.profit)
                << ',' << format_number(r.optimized.imbalance_price) << ",ok\n";
        } catch (const Error& e) {
            if (e.category() == ErrorCategory::Internal) throw;
            row["status"] = e.code();
            csv << format_number(p) << ",,,,," << e.code() << '\n';
        }
        rows.push_back(std::move(row));
    }
    if (format == ReportFormat::Csv) {
        emit(o, out, csv.str());
    } else {
        nlohmann::ordered_json doc;
        doc["scenario_id"] = s.id;
        doc["rows"] = std::move(rows);
        emit(o, out, doc.dump(2) + "\n");
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Quarter-hour balancing market simulator and battery dispatch optimizer",
                 "imbalance-sim"};
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--scenario", o.scenario_path, "Scenario JSON file");
    app.add_option("--si-trace", o.si_trace_path,
                   "CSV (minute,system_imbalance_mw) replacing the scenario's SI trace");
    auto* pos = app.add_option("--position-mwh", o.position_mwh,
                               "ISP position in MWh, + = net injection (default: scenario's)");
    app.add_option("--country", o.country, "Pricing rules: be or nl (default: scenario's)")
        ->check(CLI::IsMember({"be", "nl", "BE", "NL"}));
    app.add_option("--grid-step-mw", o.grid_step, "Per-minute power grid step in MW")
        ->capture_default_str();
    app.add_option("--max-nodes", o.max_nodes, "Search node budget")->capture_default_str();
    app.add_option("--power-mw", o.power_mw, "Battery power rating")->capture_default_str();
    app.add_option("--energy-mwh", o.energy_mwh, "Battery energy capacity")->capture_default_str();
    app.add_option("--round-trip", o.round_trip, "Battery round-trip efficiency")
        ->capture_default_str();
    auto* soc = app.add_option("--initial-soc", o.initial_soc,
                               "Initial state of charge, fraction (default: scenario's)");
    app.add_option("--seed", o.seed, "Fixture seed")->capture_default_str();
    app.add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--out", o.out_path, "Write output to this file instead of stdout");
    app.add_flag("--json-errors", o.json_errors, "Print errors as JSON on stderr");

    auto* simulate = app.add_subcommand("simulate", "Clear and settle one dispatch profile");
    simulate->add_option("--profile", o.profile_path,
                         "CSV (minute,battery_power_mw), + = discharge (default: uniform)");
    auto* optimize = app.add_subcommand("optimize", "Best grid dispatch for the position");
    auto* compare = app.add_subcommand("compare", "Uniform versus optimized dispatch report");
    auto* gen = app.add_subcommand("gen-fixture", "Write a synthetic strategy scenario");
    gen->add_option("--archetype", o.archetype,
                    "be-extreme-bid, be-mfrr-latch, nl-extreme-bid or nl-state-avoid");
    auto* sweep = app.add_subcommand("sweep-position", "Profit against ISP position");
    auto* from = sweep->add_option("--from-mwh", o.sweep_from, "First position (default: -reach)");
    auto* to = sweep->add_option("--to-mwh", o.sweep_to, "Last position (default: +reach)");
    sweep->add_option("--step-mwh", o.sweep_step, "Position step")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return 0;
        o.json_errors = false;
        for (int i = 1; i < argc; ++i) {
            if (std::string_view(argv[i]) == "--json-errors") o.json_errors = true;
        }
        if (o.json_errors) report_error(err, true, "Usage", "validation", e.what(), 2);
        return 2;
    }
    o.has_position = pos->count() > 0;
    o.has_initial_soc = soc->count() > 0;
    o.has_sweep_from = from->count() > 0;
    o.has_sweep_to = to->count() > 0;

    try {
        if (simulate->parsed()) cmd_simulate(o, out);
        else if (optimize->parsed()) cmd_optimize(o, out);
        else if (compare->parsed()) cmd_compare(o, out);
        else if (gen->parsed()) cmd_gen_fixture(o, out);
        else if (sweep->parsed()) cmd_sweep(o, out);
        return 0;
    } catch (const Error& e) {
        const int code = exit_code(e.category());
        report_error(err, o.json_errors, e.code(), category_name(e.category()), e.what(), code,
                     error_details(e));
        return code;
    } catch (const std::exception& e) {
        report_error(err, o.json_errors, "Internal", "internal", e.what(), 1);
        return 1;
    }
}

}  // namespace imbal
