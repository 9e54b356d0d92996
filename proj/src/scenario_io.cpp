#include "imbal/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "imbal/errors.hpp"

namespace imbal {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

const json& require(const json& obj, const std::string& field) {
    auto it = obj.find(field);
    if (it == obj.end()) throw SchemaError(field, "missing");
    return *it;
}

double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw SchemaError(field, "expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& field) {
    if (!v.is_number_integer()) throw SchemaError(field, "expected an integer");
    return v.get<int>();
}

BidLadder parse_ladder(const json& arr, Product product, Direction direction, const std::string& field) {
    if (!arr.is_array()) throw SchemaError(field, "expected an array of bids");
    BidLadder ladder{direction, product, {}};
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& b = arr[i];
        const std::string where = field + "[" + std::to_string(i) + "]";
        if (!b.is_object()) throw SchemaError(where, "expected an object");
        const json& id = require(b, "id");
        if (!id.is_string()) throw SchemaError(where + ".id", "expected a string");
        Bid bid;
        bid.id = id.get<std::string>();
        bid.direction = direction;
        bid.product = product;
        bid.price = as_number(require(b, "price"), where + ".price");
        bid.capacity = as_number(require(b, "capacity_mw"), where + ".capacity_mw");
        ladder.bids.push_back(std::move(bid));
    }
    return ladder;
}

ordered_json ladder_json(const BidLadder& ladder) {
    ordered_json arr = ordered_json::array();
    for (const auto& b : ladder.bids) {
        ordered_json o;
        o["id"] = b.id;
        o["price"] = b.price;
        o["capacity_mw"] = b.capacity;
        arr.push_back(std::move(o));
    }
    return arr;
}

}  // namespace

QuarterHourScenario parse_scenario_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(line, col, e.what());
    }
    if (!doc.is_object()) throw SchemaError("<root>", "expected a JSON object");

    const int version = as_int(require(doc, "schema_version"), "schema_version");
    if (version != kScenarioSchemaVersion) {
        throw SchemaError("schema_version", "unsupported version " + std::to_string(version));
    }

    QuarterHourScenario s;
    if (auto it = doc.find("id"); it != doc.end()) {
        if (!it->is_string()) throw SchemaError("id", "expected a string");
        s.id = it->get<std::string>();
    }
    const json& country = require(doc, "country");
    if (!country.is_string()) throw SchemaError("country", "expected a string");
    s.country = parse_country(country.get<std::string>());

    if (auto it = doc.find("isp_length_minutes"); it != doc.end()) {
        s.isp_length_minutes = as_int(*it, "isp_length_minutes");
    }
    if (auto it = doc.find("initial_soc"); it != doc.end()) {
        s.initial_soc = as_number(*it, "initial_soc");
    }
    if (auto it = doc.find("position_mwh"); it != doc.end()) {
        s.position_mwh = as_number(*it, "position_mwh");
    }
    if (auto it = doc.find("mfrr_policy"); it != doc.end()) {
        if (!it->is_object()) throw SchemaError("mfrr_policy", "expected an object");
        if (auto l = it->find("lead_time_minutes"); l != it->end()) {
            s.mfrr_policy.lead_time_minutes = as_int(*l, "mfrr_policy.lead_time_minutes");
        }
        if (auto l = it->find("latching"); l != it->end()) {
            if (!l->is_boolean()) throw SchemaError("mfrr_policy.latching", "expected a boolean");
            s.mfrr_policy.latching = l->get<bool>();
        }
    }

    const json& trace = require(doc, "si_trace_mw");
    if (!trace.is_array()) throw SchemaError("si_trace_mw", "expected an array");
    for (std::size_t i = 0; i < trace.size(); ++i) {
        s.si_trace.push_back(as_number(trace[i], "si_trace_mw[" + std::to_string(i) + "]"));
    }

    const json& ladders = require(doc, "ladders");
    if (!ladders.is_object()) throw SchemaError("ladders", "expected an object");
    s.ladders.afrr_up = parse_ladder(require(ladders, "afrr_up"), Product::aFRR, Direction::Upward,
                                     "ladders.afrr_up");
    s.ladders.afrr_down = parse_ladder(require(ladders, "afrr_down"), Product::aFRR,
                                       Direction::Downward, "ladders.afrr_down");
    s.ladders.mfrr_up = parse_ladder(require(ladders, "mfrr_up"), Product::mFRR, Direction::Upward,
                                     "ladders.mfrr_up");
    s.ladders.mfrr_down = parse_ladder(require(ladders, "mfrr_down"), Product::mFRR,
                                       Direction::Downward, "ladders.mfrr_down");

    s.validate();
    return s;
}

std::string scenario_to_json(const QuarterHourScenario& s) {
    ordered_json doc;
    doc["schema_version"] = kScenarioSchemaVersion;
    doc["id"] = s.id;
    doc["country"] = std::string(to_string(s.country));
    doc["isp_length_minutes"] = s.isp_length_minutes;
    doc["initial_soc"] = s.initial_soc;
    if (s.position_mwh) doc["position_mwh"] = *s.position_mwh;
    doc["mfrr_policy"] = {{"lead_time_minutes", s.mfrr_policy.lead_time_minutes},
                          {"latching", s.mfrr_policy.latching}};
    doc["si_trace_mw"] = s.si_trace;
    ordered_json ladders;
    ladders["afrr_up"] = ladder_json(s.ladders.afrr_up);
    ladders["afrr_down"] = ladder_json(s.ladders.afrr_down);
    ladders["mfrr_up"] = ladder_json(s.ladders.mfrr_up);
    ladders["mfrr_down"] = ladder_json(s.ladders.mfrr_down);
    doc["ladders"] = std::move(ladders);
    return doc.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError(path.string(), "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

QuarterHourScenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario_json(read_text_file(path));
}

void save_scenario(const QuarterHourScenario& scenario, const std::filesystem::path& path) {
    write_text_file(path, scenario_to_json(scenario));
}

namespace {

std::vector<double> parse_minute_series(std::string_view text, std::string_view value_column) {
    const std::string header = "minute," + std::string(value_column);
    std::vector<double> trace;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        if (!header_seen) {
            if (line != header) throw ParseError(line_no, 1, "expected header '" + header + "'");
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos) throw ParseError(line_no, 1, "expected two columns");
        std::string_view minute_txt = line.substr(0, comma);
        std::string_view value_txt = line.substr(comma + 1);

        int minute = 0;
        auto r1 = std::from_chars(minute_txt.data(), minute_txt.data() + minute_txt.size(), minute);
        if (r1.ec != std::errc() || r1.ptr != minute_txt.data() + minute_txt.size()) {
            throw ParseError(line_no, 1, "minute is not an integer");
        }
        double value = 0.0;
        auto r2 = std::from_chars(value_txt.data(), value_txt.data() + value_txt.size(), value);
        if (r2.ec != std::errc() || r2.ptr != value_txt.data() + value_txt.size()) {
            throw ParseError(line_no, comma + 2, std::string(value_column) + " is not a number");
        }
        if (minute != static_cast<int>(trace.size())) {
            throw ParseError(line_no, 1,
                             "expected minute " + std::to_string(trace.size()) + ", got " +
                                 std::to_string(minute));
        }
        trace.push_back(value);
        if (end == text.size()) break;
    }
    if (!header_seen) throw ParseError(1, 1, "empty file, expected header '" + header + "'");
    return trace;
}

}  // namespace

std::vector<double> parse_si_trace_csv(std::string_view text) {
    return parse_minute_series(text, "system_imbalance_mw");
}

std::vector<double> parse_profile_csv(std::string_view text) {
    return parse_minute_series(text, "battery_power_mw");
}

std::vector<double> load_si_trace_csv(const std::filesystem::path& path) {
    return parse_si_trace_csv(read_text_file(path));
}

}  // namespace imbal
