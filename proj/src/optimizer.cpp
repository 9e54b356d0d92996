#include "imbal/optimizer.hpp"

#include <cmath>
#include <sstream>

#include "dispatch_search.hpp"
#include "imbal/errors.hpp"

namespace imbal {

namespace {

constexpr double kProfitEps = 1e-9;

DispatchProfile profile_from_levels(const std::vector<int>& levels, double step) {
    std::vector<double> u;
    u.reserve(levels.size());
    for (int k : levels) u.push_back(k * step);
    return DispatchProfile::from_net_injection(u);
}

struct Incumbent {
    DispatchProfile profile;
    SettlementResult settlement;
};

Incumbent uniform_incumbent(const QuarterHourScenario& scenario, const BessSpec& spec,
                            const PowerGrid& grid, Country country) {
    DispatchProfile uniform =
        uniform_profile(grid.rounded_position_mwh, spec, scenario.isp_length_minutes);
    if (auto v = check_feasible(uniform, scenario.initial_soc, spec)) {
        std::ostringstream os;
        os << "uniform profile for " << grid.rounded_position_mwh << " MWh violates "
           << to_string(v->constraint) << " at minute " << v->minute;
        throw PowerInfeasible(os.str());
    }
    SettlementResult settled = evaluate_dispatch(scenario, uniform, country);
    return {std::move(uniform), std::move(settled)};
}

BessSpec with_scenario_dt(BessSpec spec, const QuarterHourScenario& scenario) {
    spec.dt_hours = scenario.dt_hours;
    return spec;
}

}  // namespace

void OptimizerConfig::validate(const BessSpec& spec) const {
    if (!(power_grid_step > 0.0) || !std::isfinite(power_grid_step)) {
        throw ValidationError("grid_step_positive", "power grid step must be > 0");
    }
    const double levels = spec.power_max / power_grid_step;
    if (std::abs(levels - std::round(levels)) > 1e-9 * std::max(1.0, levels)) {
        throw ValidationError("grid_step_divides_power",
                              "grid step must divide the battery power rating");
    }
    if (max_nodes == 0) throw ValidationError("max_nodes", "node budget must be positive");
}

PowerGrid make_power_grid(const BessSpec& spec, double step, double position_mwh, int isp_minutes) {
    OptimizerConfig probe;
    probe.power_grid_step = step;
    probe.validate(spec);

    PowerGrid g;
    g.step = step;
    g.levels_per_side = static_cast<int>(std::llround(spec.power_max / step));
    const double quantum = step * spec.dt_hours;
    g.target_level_sum = static_cast<int>(std::llround(position_mwh / quantum));
    g.rounded_position_mwh = g.target_level_sum * quantum;
    if (std::abs(g.target_level_sum) > g.levels_per_side * isp_minutes) {
        std::ostringstream os;
        os << "position " << position_mwh << " MWh is beyond " << spec.power_max << " MW for "
           << isp_minutes << " minutes";
        throw PowerInfeasible(os.str());
    }
    return g;
}

OptimizationResult optimize_dispatch(const QuarterHourScenario& scenario, double position_mwh,
                                     const BessSpec& spec_in, const OptimizerConfig& config) {
    const BessSpec spec = with_scenario_dt(spec_in, scenario);
    spec.validate();
    config.validate(spec);
    const Country country = config.country.value_or(scenario.country);

    if (config.search_mode == SearchMode::Exhaustive) {
        return brute_force_oracle(scenario, position_mwh, spec, config.power_grid_step, country);
    }

    const PowerGrid grid =
        make_power_grid(spec, config.power_grid_step, position_mwh, scenario.isp_length_minutes);
    Incumbent inc = uniform_incumbent(scenario, spec, grid, country);

    OptimizationResult result;
    result.requested_position_mwh = position_mwh;
    result.rounded_position_mwh = grid.rounded_position_mwh;
    result.profile = std::move(inc.profile);
    result.settlement = std::move(inc.settlement);

    detail::SearchProblem problem;
    problem.scenario = &scenario;
    problem.country = country;
    problem.spec = spec;
    problem.grid = grid;
    problem.incumbent_price = result.settlement.imbalance_price;
    problem.max_nodes = config.max_nodes;
    detail::SearchOutcome found = detail::search_grid(problem);
    result.budget_exhausted = found.budget_exhausted;
    result.nodes = found.nodes;

    for (const auto& levels : found.candidates) {
        DispatchProfile candidate = profile_from_levels(levels, grid.step);
        if (check_feasible(candidate, scenario.initial_soc, spec)) continue;
        SettlementResult settled;
        try {
            settled = evaluate_dispatch(scenario, candidate, country);
        } catch (const Error&) {
            continue;
        }
        if (settled.profit > result.settlement.profit + kProfitEps) {
            result.profile = std::move(candidate);
            result.settlement = std::move(settled);
            result.improved_on_uniform = true;
        }
    }
    return result;
}

OptimizationResult brute_force_oracle(const QuarterHourScenario& scenario, double position_mwh,
                                      const BessSpec& spec_in, double grid_step,
                                      std::optional<Country> country_opt) {
    const BessSpec spec = with_scenario_dt(spec_in, scenario);
    spec.validate();
    const Country country = country_opt.value_or(scenario.country);
    const int n = scenario.isp_length_minutes;
    const PowerGrid grid = make_power_grid(spec, grid_step, position_mwh, n);
    const int k_max = grid.levels_per_side;

    const double per_minute = 2.0 * k_max + 1.0;
    if (std::pow(per_minute, n) > static_cast<double>(kMaxEnumeratedProfiles)) {
        std::ostringstream os;
        os << per_minute << "^" << n << " profiles exceed the enumeration bound of "
           << kMaxEnumeratedProfiles;
        throw EnumerationTooLarge(os.str());
    }

    Incumbent inc = uniform_incumbent(scenario, spec, grid, country);
    OptimizationResult result;
    result.requested_position_mwh = position_mwh;
    result.rounded_position_mwh = grid.rounded_position_mwh;
    result.profile = std::move(inc.profile);
    result.settlement = std::move(inc.settlement);

    std::vector<int> levels(static_cast<std::size_t>(n), -k_max);
    // Odometer over all level sequences, lexicographic from the most charging.
    auto evaluate_current = [&]() {
        ++result.nodes;
        int sum = 0;
        for (int k : levels) sum += k;
        if (sum != grid.target_level_sum) return;
        DispatchProfile candidate = profile_from_levels(levels, grid.step);
        if (check_feasible(candidate, scenario.initial_soc, spec)) return;
        SettlementResult settled;
        try {
            settled = evaluate_dispatch(scenario, candidate, country);
        } catch (const Error&) {
            return;
        }
        if (settled.profit > result.settlement.profit + kProfitEps) {
            result.profile = std::move(candidate);
            result.settlement = std::move(settled);
            result.improved_on_uniform = true;
        }
    };
    while (true) {
        evaluate_current();
        int i = n - 1;
        while (i >= 0 && levels[static_cast<std::size_t>(i)] == k_max) {
            levels[static_cast<std::size_t>(i)] = -k_max;
            --i;
        }
        if (i < 0) break;
        ++levels[static_cast<std::size_t>(i)];
    }
    return result;
}

}  // namespace imbal
