// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "imbal/cli.hpp"
#include "imbal/errors.hpp"
#include "imbal/optimizer.hpp"
#include "imbal/pricing_nl.hpp"
#include "imbal/report.hpp"
#include "imbal/scenario_io.hpp"
#include "oracles/clearing_dual.hpp"
#include "oracles/random_scenarios.hpp"
#include "oracles/regulation_literal.hpp"

using namespace imbal;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void run(const std::string& name, double limit_s, const std::function<Verdict()>& body) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (limit_s > 0 && secs > limit_s) {
        v.pass = false;
        v.detail += " (over the " + std::to_string(static_cast<int>(limit_s)) + " s limit)";
    }
    if (!v.pass) ++failures;
    std::printf("%s  %-34s %7.2fs  %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), secs,
                v.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

Verdict lower_level_oracle() {
    oracle::Rng rng(101);
    int mismatches = 0;
    double worst = 0.0;
    constexpr int kInstances = 1000;
    for (int i = 0; i < kInstances; ++i) {
        const LadderSet ladders =
            oracle::random_ladders(rng, 8, rng.uniform(1.0, 40.0), rng.uniform(1.0, 40.0));
        const double up = ladders.afrr_up.total_capacity() + ladders.mfrr_up.total_capacity();
        const double down = ladders.afrr_down.total_capacity() + ladders.mfrr_down.total_capacity();
        double r = 0.0;
        switch (i % 5) {
        case 0: r = ladders.afrr_up.total_capacity(); break;  // exactly saturated
        case 1: r = -ladders.afrr_down.total_capacity(); break;
        default: r = rng.uniform(-down, up);
        }
        const double brp = rng.uniform(-10.0, 10.0);
        const MinuteClearing c = clear_minute({0, brp - r, brp}, ladders, false);
        const double err = std::abs(c.activation_cost() - oracle::min_activation_cost(ladders, r));
        worst = std::max(worst, err);
        if (err > 1e-6) ++mismatches;
    }
    return {mismatches == 0, std::to_string(kInstances) + " instances, " +
                                 std::to_string(mismatches) + " mismatches, max |diff| " +
                                 fmt(worst) + " EUR"};
}

Verdict bilevel_oracle() {
    oracle::Rng rng(202);
    int compared = 0;
    int both_raised = 0;
    int mismatches = 0;
    double worst = 0.0;
    std::string first_bad;
    constexpr int kTarget = 500;
    for (int attempt = 0; compared < kTarget && attempt < 5000; ++attempt) {
        const int isp = rng.integer(2, 6);
        const int k = rng.integer(1, 3);
        const double power = 6.0;
        const double step = power / k;
        const Country country = rng.coin() ? Country::Belgium : Country::Netherlands;
        QuarterHourScenario s = oracle::random_scenario(rng, isp, power, country);
        double energy = rng.grid(0.1, 2.0, 0.1);
        if (attempt % 2 == 1) {
            // thin aFRR and a small battery: mFRR requests and SoC limits bind
            for (auto* l : {&s.ladders.afrr_up, &s.ladders.afrr_down}) {
                for (auto& b : l->bids) b.capacity = rng.grid(0.5, 3.0, 0.5);
            }
            for (auto& v : s.si_trace) v = rng.grid(-8.0, 8.0, 0.5);
            energy = rng.grid(0.1, 0.6, 0.05);
        }
        const BessSpec spec = BessSpec::with_round_trip(power, energy, 0.9);
        const int level_sum = rng.integer(-k * isp, k * isp);
        const double position = level_sum * step * s.dt_hours;

        OptimizerConfig cfg;
        cfg.power_grid_step = step;
        std::optional<OptimizationResult> dp;
        std::optional<OptimizationResult> bf;
        std::string dp_err;
        std::string bf_err;
        try {
            dp = optimize_dispatch(s, position, spec, cfg);
        } catch (const Error& e) {
            dp_err = e.code();
        }
        try {
            bf = brute_force_oracle(s, position, spec, step);
        } catch (const Error& e) {
            bf_err = e.code();
        }
        if (!dp && !bf && dp_err == bf_err) {
            ++both_raised;
            continue;
        }
        if (!dp || !bf) {
            ++mismatches;
            if (first_bad.empty()) first_bad = "error mismatch '" + dp_err + "' vs '" + bf_err + "'";
            continue;
        }
        ++compared;
        const double err = std::abs(dp->settlement.profit - bf->settlement.profit);
        worst = std::max(worst, err);
        if (err > 1e-6) {
            ++mismatches;
            if (first_bad.empty()) {
                first_bad = "attempt " + std::to_string(attempt) + ": dp " +
                            fmt(dp->settlement.profit) + " vs oracle " + fmt(bf->settlement.profit);
            }
        }
    }
    std::string detail = std::to_string(compared) + " instances compared (" +
                         std::to_string(both_raised) + " raised the same error in both), " +
                         std::to_string(mismatches) + " mismatches, max |diff| " + fmt(worst) +
                         " EUR";
    if (!first_bad.empty()) detail += "; first: " + first_bad;
    return {compared >= kTarget && mismatches == 0, detail};
}

Verdict incumbent_dominance() {
    oracle::Rng rng(303);
    const BessSpec spec;
    OptimizerConfig cfg;
    cfg.power_grid_step = 2.5;
    int feasible = 0;
    int violations = 0;
    int strict = 0;
    int exhausted = 0;
    for (int attempt = 0; feasible < 1000 && attempt < 5000; ++attempt) {
        const Country country = rng.coin() ? Country::Belgium : Country::Netherlands;
        QuarterHourScenario s = oracle::random_scenario(rng, 15, spec.power_max, country);
        const double position = rng.integer(-60, 60) * cfg.power_grid_step * s.dt_hours;
        OptimizationResult r;
        try {
            r = optimize_dispatch(s, position, spec, cfg);
        } catch (const Error&) {
            continue;  // uniform profile infeasible or unpriceable
        }
        ++feasible;
        const SettlementResult u =
            evaluate_dispatch(s, uniform_profile(r.rounded_position_mwh, spec, 15));
        if (r.settlement.profit < u.profit - 1e-9) ++violations;
        if (r.settlement.profit > u.profit + 1e-9) ++strict;
        if (r.budget_exhausted) ++exhausted;
    }

    std::string per_archetype;
    bool all_strict = true;
    for (auto a : {Archetype::BeExtremeBid, Archetype::BeMfrrLatch, Archetype::NlExtremeBid,
                   Archetype::NlStateAvoid}) {
        const QuarterHourScenario f = generate_strategy_fixture(a, 0);
        const ComparisonReport rep = compare_strategies(f, *f.position_mwh, spec, OptimizerConfig{});
        const bool ok = rep.profit_delta > 1e-9;
        all_strict = all_strict && ok;
        per_archetype += std::string(" ") + std::string(to_string(a)) + (ok ? "+" : "=");
    }
    return {feasible >= 1000 && violations == 0 && all_strict,
            std::to_string(feasible) + " random scenarios, " + std::to_string(violations) +
                " below uniform, " + std::to_string(strict) + " strictly better, " +
                std::to_string(exhausted) + " budget-exhausted; fixtures:" + per_archetype};
}

struct ArchetypeRun {
    QuarterHourScenario scenario;
    ComparisonReport report;
    OptimizationResult optimized;
    SettlementResult uniform;
};

ArchetypeRun run_archetype(Archetype a, std::uint64_t seed) {
    ArchetypeRun r;
    r.scenario = generate_strategy_fixture(a, seed);
    const BessSpec spec;
    r.optimized = optimize_dispatch(r.scenario, *r.scenario.position_mwh, spec, OptimizerConfig{});
    r.uniform = evaluate_dispatch(r.scenario,
                                  uniform_profile(r.optimized.rounded_position_mwh, spec, 15));
    r.report = compare_strategies(r.scenario, *r.scenario.position_mwh, spec, OptimizerConfig{});
    return r;
}

constexpr int kArchetypeSeeds = 5;

Verdict be_extreme_bid() {
    std::string detail;
    bool pass = true;
    for (int seed = 0; seed < kArchetypeSeeds; ++seed) {
        const ArchetypeRun r = run_archetype(Archetype::BeExtremeBid, static_cast<std::uint64_t>(seed));
        const double position = r.optimized.rounded_position_mwh;
        int counter_full = 0;
        for (double p : r.optimized.profile.net_injection()) {
            // position < 0 means net charging, so full discharge runs against it
            if (std::abs(p - 10.0) < 1e-9 && position < 0) ++counter_full;
        }
        const auto& ub = std::get<BelgianPriceBreakdown>(r.uniform.breakdown);
        const bool surplus = ub.si_sign_basis > 0;
        const double pu = r.uniform.imbalance_price;
        const double po = r.optimized.settlement.imbalance_price;
        const bool more_extreme = surplus ? po < pu : po > pu;
        const bool ok = counter_full >= 1 && more_extreme;
        pass = pass && ok;
        if (seed == 0 || !ok) {
            detail += "seed " + std::to_string(seed) + ": " + std::to_string(counter_full) +
                      " full-power counter minutes, price " + fmt(pu) + " -> " + fmt(po) + "; ";
        }
    }
    return {pass, detail + std::to_string(kArchetypeSeeds) + " seeds"};
}

Verdict be_mfrr_latch() {
    std::string detail;
    bool pass = true;
    for (int seed = 0; seed < kArchetypeSeeds; ++seed) {
        const ArchetypeRun r = run_archetype(Archetype::BeMfrrLatch, static_cast<std::uint64_t>(seed));
        const auto& s = r.scenario;
        double natural = 0.0;
        for (double v : s.si_trace) natural += v;
        const auto& ub = std::get<BelgianPriceBreakdown>(r.uniform.breakdown);
        const auto& ob = std::get<BelgianPriceBreakdown>(r.optimized.settlement.breakdown);
        const auto& q = r.optimized.settlement.clearing;
        const int lead = s.mfrr_policy.lead_time_minutes;
        bool latched = q.first_mfrr_delivery_minute == lead;
        for (int t = lead; t < s.isp_length_minutes; ++t) {
            const auto& m = q.minutes[static_cast<std::size_t>(t)];
            latched = latched && m.mfrr_active && std::abs(m.mfrr_volume) > 1e-9;
        }
        const bool uniform_flips = (natural > 0) != (ub.si_sign_basis > 0);
        const bool optimized_keeps = (natural > 0) == (ob.si_sign_basis > 0);
        const bool ok = uniform_flips && r.uniform.profit < 0 && latched && optimized_keeps &&
                        r.optimized.settlement.profit > 0;
        pass = pass && ok;
        if (seed == 0 || !ok) {
            detail += "seed " + std::to_string(seed) + ": uniform profit " + fmt(r.uniform.profit) +
                      ", mFRR from minute " +
                      (q.first_mfrr_delivery_minute ? std::to_string(*q.first_mfrr_delivery_minute)
                                                    : std::string("none")) +
                      (latched ? " latched" : " not latched") + ", optimized profit " +
                      fmt(r.optimized.settlement.profit) + "; ";
        }
    }
    return {pass, detail + std::to_string(kArchetypeSeeds) + " seeds"};
}

Verdict nl_extreme_bid() {
    std::string detail;
    bool pass = true;
    for (int seed = 0; seed < kArchetypeSeeds; ++seed) {
        const ArchetypeRun r = run_archetype(Archetype::NlExtremeBid, static_cast<std::uint64_t>(seed));
        const auto& ub = std::get<DutchPriceBreakdown>(r.uniform.breakdown);
        const auto& ob = std::get<DutchPriceBreakdown>(r.optimized.settlement.breakdown);
        int at_extreme = 0;
        if (ob.lambda_up) {
            for (const auto& m : r.optimized.settlement.clearing.minutes) {
                if (m.afrr_volume > 1e-9 && m.afrr_marginal_price == *ob.lambda_up) ++at_extreme;
            }
        }
        const bool ok = ub.state == RegulationState::Up && ob.state == RegulationState::Up &&
                        ub.lambda_up && ob.lambda_up && *ob.lambda_up > *ub.lambda_up &&
                        at_extreme == 1;
        pass = pass && ok;
        if (seed == 0 || !ok) {
            detail += "seed " + std::to_string(seed) + ": states " +
                      std::string(to_string(ub.state)) + "/" + std::string(to_string(ob.state)) +
                      ", lambda+ " + fmt(ub.lambda_up.value_or(NAN)) + " -> " +
                      fmt(ob.lambda_up.value_or(NAN)) + " set at " + std::to_string(at_extreme) +
                      " minute(s); ";
        }
    }
    return {pass, detail + std::to_string(kArchetypeSeeds) + " seeds"};
}

Verdict nl_state_avoid() {
    std::string detail;
    bool pass = true;
    for (int seed = 0; seed < kArchetypeSeeds; ++seed) {
        const ArchetypeRun r = run_archetype(Archetype::NlStateAvoid, static_cast<std::uint64_t>(seed));
        const auto& ub = std::get<DutchPriceBreakdown>(r.uniform.breakdown);
        const auto& ob = std::get<DutchPriceBreakdown>(r.optimized.settlement.breakdown);
        const bool short_side = ub.lambda_up && ub.brp_price == std::max(*ub.lambda_up, ub.lambda_mid);
        const bool ok = ub.state == RegulationState::Dual && short_side &&
                        ob.state == RegulationState::Down &&
                        r.optimized.settlement.profit > r.uniform.profit;
        pass = pass && ok;
        if (seed == 0 || !ok) {
            detail += "seed " + std::to_string(seed) + ": state " + std::string(to_string(ub.state)) +
                      " -> " + std::string(to_string(ob.state)) + ", profit " +
                      fmt(r.uniform.profit) + " -> " + fmt(r.optimized.settlement.profit) + "; ";
        }
    }
    return {pass, detail + std::to_string(kArchetypeSeeds) + " seeds"};
}

Verdict classifier() {
    oracle::Rng rng(404);
    int mismatches = 0;
    constexpr int kSequences = 10000;
    for (int i = 0; i < kSequences; ++i) {
        const int n = rng.integer(2, 15);
        const int spread = rng.integer(1, 6);
        std::vector<double> d;
        const bool monotone = rng.coin(0.3);
        for (int t = 0; t < n; ++t) d.push_back(rng.integer(-spread, spread) * 1.5);
        if (monotone) {
            std::sort(d.begin(), d.end());
            if (rng.coin()) std::reverse(d.begin(), d.end());
        }
        if (rng.coin(0.05)) std::fill(d.begin(), d.end(), 0.0);
        if (static_cast<int>(regulation_state(d)) != oracle::literal_regulation_state(d)) ++mismatches;
    }
    return {mismatches == 0, std::to_string(kSequences) + " sequences, " +
                                 std::to_string(mismatches) + " mismatches"};
}

Verdict battery_algebra() {
    oracle::Rng rng(505);
    double worst_soc = 0.0;
    double worst_pos = 0.0;
    constexpr int kCases = 20000;
    for (int i = 0; i < kCases; ++i) {
        BessSpec spec = BessSpec::with_round_trip(rng.uniform(0.5, 50.0), rng.uniform(0.5, 100.0),
                                                  rng.uniform(0.5, 1.0));
        const double soc = rng.uniform(0.0, 1.0);
        const double pc = rng.uniform(0.0, spec.power_max);
        const double back = soc_step(soc_step(soc, pc, 0.0, spec), 0.0,
                                     pc * spec.eta_charge * spec.eta_discharge, spec);
        worst_soc = std::max(worst_soc, std::abs(back - soc));

        const int isp = rng.integer(1, 60);
        const double reach = spec.power_max * isp * spec.dt_hours;
        const double position = rng.uniform(-reach, reach);
        const double got = position_energy(uniform_profile(position, spec, isp), spec.dt_hours);
        worst_pos = std::max(worst_pos, std::abs(got - position));
    }
    return {worst_soc <= 1e-9 && worst_pos <= 1e-9,
            std::to_string(kCases) + " cases, max SoC round-trip error " + fmt(worst_soc) +
                ", max position error " + fmt(worst_pos) + " MWh"};
}

std::string cli_output(const std::vector<std::string>& args, int& code) {
    std::vector<const char*> argv{"imbalance-sim"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return out.str() + err.str();
}

Verdict determinism() {
    const auto dir = std::filesystem::temp_directory_path() / "imbal_acceptance";
    std::filesystem::create_directories(dir);
    int runs = 0;
    int differing = 0;
    int nonzero = 0;
    for (auto a : {Archetype::BeExtremeBid, Archetype::BeMfrrLatch, Archetype::NlExtremeBid,
                   Archetype::NlStateAvoid}) {
        for (int seed = 0; seed < 3; ++seed) {
            const auto path = dir / (std::string(to_string(a)) + "-" + std::to_string(seed) + ".json");
            int code = 0;
            const std::string f1 = cli_output({"gen-fixture", "--archetype", std::string(to_string(a)),
                                               "--seed", std::to_string(seed), "--out", path.string()},
                                              code);
            nonzero += code != 0;
            const std::string bytes1 = read_text_file(path);
            cli_output({"gen-fixture", "--archetype", std::string(to_string(a)), "--seed",
                        std::to_string(seed), "--out", path.string()},
                       code);
            differing += read_text_file(path) != bytes1;
            for (const char* format : {"json", "csv"}) {
                int c1 = 0;
                int c2 = 0;
                const std::string o1 =
                    cli_output({"compare", "--scenario", path.string(), "--format", format}, c1);
                const std::string o2 =
                    cli_output({"compare", "--scenario", path.string(), "--format", format}, c2);
                ++runs;
                nonzero += (c1 != 0) + (c2 != 0);
                differing += o1 != o2 || o1.empty();
            }
        }
    }
    return {differing == 0 && nonzero == 0,
            std::to_string(runs) + " compare pairs on 12 fixtures, " + std::to_string(differing) +
                " differing, " + std::to_string(nonzero) + " non-zero exits"};
}

}  // namespace

int main() {
    run("lower-level-oracle-equivalence", 10, lower_level_oracle);
    run("bilevel-oracle-equivalence", 60, bilevel_oracle);
    run("incumbent-dominance", 300, incumbent_dominance);
    run("be-extreme-bid-archetype", 0, be_extreme_bid);
    run("be-mfrr-latch-archetype", 0, be_mfrr_latch);
    run("nl-extreme-bid-archetype", 0, nl_extreme_bid);
    run("nl-state-avoid-archetype", 0, nl_state_avoid);
    run("regulation-state-classifier", 0, classifier);
    run("battery-algebra", 0, battery_algebra);
    run("compare-determinism", 0, determinism);
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
