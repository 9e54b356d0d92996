#include <cctype>
#include <cmath>
#include <random>
#include <string>

#include "imbal/errors.hpp"
#include "imbal/scenario_io.hpp"
#include "imbal/settlement.hpp"

namespace imbal {

std::string_view to_string(Archetype a) {
    switch (a) {
    case Archetype::BeExtremeBid: return "be-extreme-bid";
    case Archetype::BeMfrrLatch: return "be-mfrr-latch";
    case Archetype::NlExtremeBid: return "nl-extreme-bid";
    case Archetype::NlStateAvoid: return "nl-state-avoid";
    }
    return "unknown";
}

Archetype parse_archetype(std::string_view s) {
    std::string key;
    for (char c : s) {
        if (c == '-' || c == '_') continue;
        key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (key == "beextremebid") return Archetype::BeExtremeBid;
    if (key == "bemfrrlatch") return Archetype::BeMfrrLatch;
    if (key == "nlextremebid") return Archetype::NlExtremeBid;
    if (key == "nlstateavoid") return Archetype::NlStateAvoid;
    throw SchemaError("archetype", "unknown archetype '" + std::string(s) + "'");
}

namespace {

constexpr int kIsp = 15;

// Raw mt19937_64 output is fully specified by the standard, unlike the
// distribution classes, so fixtures are identical across toolchains.
class Jitter {
public:
    explicit Jitter(std::uint64_t seed) : rng_(seed) {}

    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    /// Uniform multiple of `quantum` in [lo, hi].
    double quantized(double lo, double hi, double quantum) {
        const auto steps = static_cast<long>(std::floor((hi - lo) / quantum + 1e-9));
        const auto pick = static_cast<long>(std::floor(unit() * static_cast<double>(steps + 1)));
        return lo + quantum * static_cast<double>(std::min(pick, steps));
    }

private:
    std::mt19937_64 rng_;
};

BidLadder ladder(Product p, Direction d, std::string_view prefix,
                 std::initializer_list<std::pair<double, double>> cap_price) {
    BidLadder l{d, p, {}};
    int i = 0;
    for (auto [cap, price] : cap_price) {
        l.bids.push_back({std::string(prefix) + std::to_string(++i), d, p, price, cap});
    }
    return l;
}

QuarterHourScenario base(Archetype a, std::uint64_t seed, Country c) {
    QuarterHourScenario s;
    s.id = std::string(to_string(a)) + "-" + std::to_string(seed);
    s.country = c;
    s.isp_length_minutes = kIsp;
    s.initial_soc = 0.5;
    s.mfrr_policy = MfrrPolicy{3, true};
    return s;
}

// Spreads `total` MW·min over `minutes` entries on a `step` MW grid,
// larger entries first.
std::vector<double> spread_on_grid(double total, int minutes, double step) {
    const auto units = std::llround(total / step);
    std::vector<double> out(static_cast<std::size_t>(minutes));
    const auto base_units = units / minutes;
    const auto extra = units % minutes;
    for (int i = 0; i < minutes; ++i) {
        out[static_cast<std::size_t>(i)] =
            static_cast<double>(base_units + (i < extra ? 1 : 0)) * step;
    }
    return out;
}

struct Candidate {
    QuarterHourScenario scenario;
    std::vector<double> witness;  // net injection, MW
};

// Surplus ISP; the -350 bid is only reachable by discharging at full power
// into the SI peak at minute 7 while charging harder elsewhere.
Candidate be_extreme_bid(Jitter& j, std::uint64_t seed) {
    Candidate c{base(Archetype::BeExtremeBid, seed, Country::Belgium), {}};
    auto& s = c.scenario;
    for (int t = 0; t < kIsp; ++t) s.si_trace.push_back(j.quantized(19.0, 21.0, 0.25));
    s.si_trace[7] = j.quantized(29.5, 30.5, 0.25);
    s.ladders.afrr_up = ladder(Product::aFRR, Direction::Upward, "au",
                               {{10.0, j.quantized(40, 60, 1)}, {15.0, j.quantized(80, 110, 1)}});
    s.ladders.afrr_down = ladder(Product::aFRR, Direction::Downward, "ad",
                                 {{10.0, j.quantized(-55, -45, 1)},
                                  {10.0, j.quantized(-65, -58, 1)},
                                  {10.0, j.quantized(-75, -68, 1)},
                                  {8.0, j.quantized(-90, -80, 1)},
                                  {7.0, -350.0}});
    s.ladders.mfrr_up = ladder(Product::mFRR, Direction::Upward, "mu", {{50.0, 200.0}});
    s.ladders.mfrr_down = ladder(Product::mFRR, Direction::Downward, "md", {{50.0, -400.0}});
    s.position_mwh = -2.5 * kIsp / 60.0;

    const double charge_total = 2.5 * kIsp + 10.0;
    auto rest = spread_on_grid(charge_total, kIsp - 1, 0.5);
    for (int t = 0, k = 0; t < kIsp; ++t) {
        c.witness.push_back(t == 7 ? 10.0 : -rest[static_cast<std::size_t>(k++)]);
    }
    return c;
}

// Natural surplus that uniform charging turns into a shortage. A full
// charge at minute 0 saturates the 5 MW aFRR up ladder; the latched mFRR
// delivery from minute 3 flips the aFRR balance back to surplus.
Candidate be_mfrr_latch(Jitter& j, std::uint64_t seed) {
    Candidate c{base(Archetype::BeMfrrLatch, seed, Country::Belgium), {}};
    auto& s = c.scenario;
    s.si_trace.push_back(j.quantized(3.25, 4.0, 0.25));
    for (int t = 1; t < kIsp; ++t) s.si_trace.push_back(j.quantized(7.0, 8.0, 0.25));
    s.ladders.afrr_up = ladder(Product::aFRR, Direction::Upward, "au",
                               {{2.0, j.quantized(50, 70, 1)}, {3.0, j.quantized(80, 100, 1)}});
    s.ladders.afrr_down = ladder(Product::aFRR, Direction::Downward, "ad",
                                 {{5.0, j.quantized(-25, -15, 1)},
                                  {5.0, j.quantized(-55, -45, 1)},
                                  {10.0, j.quantized(-95, -85, 1)},
                                  {40.0, j.quantized(-160, -140, 1)}});
    s.ladders.mfrr_up = ladder(Product::mFRR, Direction::Upward, "mu",
                               {{10.0, j.quantized(140, 160, 1)}, {50.0, 250.0}});
    s.ladders.mfrr_down = ladder(Product::mFRR, Direction::Downward, "md", {{50.0, -200.0}});
    s.position_mwh = -8.0 * kIsp / 60.0;

    auto rest = spread_on_grid(8.0 * kIsp - 10.0, kIsp - 1, 0.5);
    c.witness.push_back(-10.0);
    for (double v : rest) c.witness.push_back(-v);
    return c;
}

// Shortage ISP with a discharging position. One charging minute of at least
// 5.5 MW pushes the upward aFRR need into the 300 EUR/MWh bid; the position
// leaves room for only one such minute.
Candidate nl_extreme_bid(Jitter& j, std::uint64_t seed) {
    Candidate c{base(Archetype::NlExtremeBid, seed, Country::Netherlands), {}};
    auto& s = c.scenario;
    for (int t = 0; t < kIsp; ++t) s.si_trace.push_back(-j.quantized(19.75, 20.25, 0.25));
    s.si_trace.back() = -20.0;
    s.ladders.afrr_up = ladder(Product::aFRR, Direction::Upward, "au",
                               {{10.0, j.quantized(45, 55, 1)},
                                {5.0, j.quantized(75, 85, 1)},
                                {10.0, j.quantized(115, 125, 1)},
                                {20.0, 300.0}});
    s.ladders.afrr_down = ladder(Product::aFRR, Direction::Downward, "ad",
                                 {{20.0, j.quantized(5, 15, 1)}, {20.0, -30.0}});
    s.ladders.mfrr_up = ladder(Product::mFRR, Direction::Upward, "mu", {{50.0, 400.0}});
    s.ladders.mfrr_down = ladder(Product::mFRR, Direction::Downward, "md", {{50.0, -100.0}});
    s.position_mwh = 8.5 * kIsp / 60.0;

    auto rest = spread_on_grid(8.5 * kIsp + 10.0, kIsp - 1, 0.5);
    for (double v : rest) c.witness.push_back(v);
    c.witness.push_back(-10.0);  // last minute charges at full power
    return c;
}

// Surplus ISP with a few near-zero SI minutes in the middle. Uniform charging
// makes those minutes upward, so deltas change direction twice (state 2);
// idling there keeps every minute downward.
Candidate nl_state_avoid(Jitter& j, std::uint64_t seed) {
    Candidate c{base(Archetype::NlStateAvoid, seed, Country::Netherlands), {}};
    auto& s = c.scenario;
    for (int t = 0; t < kIsp; ++t) s.si_trace.push_back(j.quantized(14.0, 16.0, 0.25));
    const int quiet_a = 4 + static_cast<int>(j.quantized(0, 2, 1));
    const int quiet_b = 9 + static_cast<int>(j.quantized(0, 2, 1));
    s.si_trace[static_cast<std::size_t>(quiet_a)] = j.quantized(0.5, 1.5, 0.25);
    s.si_trace[static_cast<std::size_t>(quiet_b)] = j.quantized(0.5, 1.5, 0.25);
    s.ladders.afrr_up = ladder(Product::aFRR, Direction::Upward, "au",
                               {{10.0, j.quantized(55, 65, 1)}, {20.0, j.quantized(95, 110, 1)}});
    s.ladders.afrr_down = ladder(Product::aFRR, Direction::Downward, "ad",
                                 {{5.0, j.quantized(-15, -5, 1)},
                                  {10.0, j.quantized(-45, -35, 1)},
                                  {20.0, j.quantized(-85, -75, 1)}});
    s.ladders.mfrr_up = ladder(Product::mFRR, Direction::Upward, "mu", {{50.0, 250.0}});
    s.ladders.mfrr_down = ladder(Product::mFRR, Direction::Downward, "md", {{50.0, -200.0}});
    s.position_mwh = -5.0 * kIsp / 60.0;

    auto rest = spread_on_grid(5.0 * kIsp, kIsp - 2, 0.5);
    for (int t = 0, k = 0; t < kIsp; ++t) {
        const bool quiet = t == quiet_a || t == quiet_b;
        c.witness.push_back(quiet ? 0.0 : -rest[static_cast<std::size_t>(k++)]);
    }
    return c;
}

bool has_gap(Archetype a, const Candidate& c) {
    const auto& s = c.scenario;
    const double position = *s.position_mwh;
    const BessSpec spec;
    const DispatchProfile uniform = uniform_profile(position, spec, s.isp_length_minutes);
    const DispatchProfile witness = DispatchProfile::from_net_injection(c.witness);
    if (check_feasible(witness, s.initial_soc, spec)) return false;
    if (std::abs(position_energy(witness, spec.dt_hours) - position) > 1e-9) return false;

    const SettlementResult u = evaluate_dispatch(s, uniform);
    const SettlementResult w = evaluate_dispatch(s, witness);
    if (!(w.profit > u.profit + 1e-6)) return false;

    switch (a) {
    case Archetype::BeExtremeBid: {
        const auto& ub = std::get<BelgianPriceBreakdown>(u.breakdown);
        return ub.branch == BelgianBranch::Downward && w.imbalance_price < u.imbalance_price;
    }
    case Archetype::BeMfrrLatch: {
        const auto& ub = std::get<BelgianPriceBreakdown>(u.breakdown);
        const auto& wb = std::get<BelgianPriceBreakdown>(w.breakdown);
        return ub.si_sign_basis <= 0.0 && u.profit < 0.0 && wb.si_sign_basis > 0.0 &&
               w.profit > 0.0 && w.clearing.first_mfrr_delivery_minute == s.mfrr_policy.lead_time_minutes;
    }
    case Archetype::NlExtremeBid: {
        const auto& ub = std::get<DutchPriceBreakdown>(u.breakdown);
        const auto& wb = std::get<DutchPriceBreakdown>(w.breakdown);
        return ub.state == RegulationState::Up && wb.state == RegulationState::Up && ub.lambda_up &&
               wb.lambda_up && *wb.lambda_up > *ub.lambda_up;
    }
    case Archetype::NlStateAvoid: {
        const auto& ub = std::get<DutchPriceBreakdown>(u.breakdown);
        const auto& wb = std::get<DutchPriceBreakdown>(w.breakdown);
        return ub.state == RegulationState::Dual && wb.state == RegulationState::Down;
    }
    }
    return false;
}

}  // namespace

QuarterHourScenario generate_strategy_fixture(Archetype archetype, std::uint64_t seed) {
    constexpr int kAttempts = 64;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        Jitter j(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(attempt) + 1);
        Candidate c;
        switch (archetype) {
        case Archetype::BeExtremeBid: c = be_extreme_bid(j, seed); break;
        case Archetype::BeMfrrLatch: c = be_mfrr_latch(j, seed); break;
        case Archetype::NlExtremeBid: c = nl_extreme_bid(j, seed); break;
        case Archetype::NlStateAvoid: c = nl_state_avoid(j, seed); break;
        }
        c.scenario.validate();
        try {
            if (has_gap(archetype, c)) return c.scenario;
        } catch (const Error&) {
            // a jittered draw the market cannot clear; draw again
        }
    }
    throw Error("FixtureGeneration", ErrorCategory::Internal,
                "no " + std::string(to_string(archetype)) + " fixture found for seed " +
                    std::to_string(seed));
}

}  // namespace imbal
