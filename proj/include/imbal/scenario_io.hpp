#pragma once

// Scenario files, SI-trace CSV ingestion and synthetic strategy fixtures.
//
// Scenario JSON (schema_version 1):
//
//   {
//     "schema_version": 1,
//     "id": "be-extreme-bid-0",
//     "country": "be" | "nl",
//     "isp_length_minutes": 15,            // optional, default 15
//     "initial_soc": 0.5,                  // optional, default 0.5
//     "position_mwh": -0.65,               // optional nominated position
//     "mfrr_policy": {"lead_time_minutes": 3, "latching": true},  // optional
//     "si_trace_mw": [ ... one value per minute, + = surplus ... ],
//     "ladders": {
//       "afrr_up":   [{"id": "...", "price": 50.0, "capacity_mw": 10.0}, ...],
//       "afrr_down": [...], "mfrr_up": [...], "mfrr_down": [...]
//     }
//   }
//
// Ladders must already be in merit order. Bid ladders are not published by
// the TSOs; files built from public data carry reconstructed ladders.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "imbal/scenario.hpp"

namespace imbal {

inline constexpr int kScenarioSchemaVersion = 1;

QuarterHourScenario parse_scenario_json(std::string_view text);
std::string scenario_to_json(const QuarterHourScenario& scenario);

/// Reads and validates a scenario file. Throws ParseError, SchemaError or
/// ValidationError.
QuarterHourScenario load_scenario(const std::filesystem::path& path);
void save_scenario(const QuarterHourScenario& scenario, const std::filesystem::path& path);

/// CSV with header `minute,system_imbalance_mw`; minutes must be 0..n-1 in order.
std::vector<double> parse_si_trace_csv(std::string_view text);
std::vector<double> load_si_trace_csv(const std::filesystem::path& path);

/// Dispatch CSV with header `minute,battery_power_mw` (+ = discharge).
std::vector<double> parse_profile_csv(std::string_view text);

enum class Archetype { BeExtremeBid, BeMfrrLatch, NlExtremeBid, NlStateAvoid };

std::string_view to_string(Archetype a);
Archetype parse_archetype(std::string_view s);

/// Deterministic synthetic scenario whose ISP admits the archetype's gaming
/// gap for the default 10 MW / 20 MWh battery at the embedded position.
/// The gap is checked against a witness profile before returning.
QuarterHourScenario generate_strategy_fixture(Archetype archetype, std::uint64_t seed);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace imbal
