#pragma once

#include <cstddef>
#include <vector>

#include "imbal/battery.hpp"
#include "imbal/optimizer.hpp"
#include "imbal/scenario.hpp"

namespace imbal::detail {

struct SearchProblem {
    const QuarterHourScenario* scenario = nullptr;
    Country country = Country::Belgium;
    BessSpec spec;
    PowerGrid grid;
    /// Price of the incumbent; only strictly better paths are reported.
    double incumbent_price = 0.0;
    std::size_t max_nodes = 0;
};

struct SearchOutcome {
    /// Candidate level sequences (power = level * grid step), best first is
    /// not guaranteed; the caller re-evaluates each.
    std::vector<std::vector<int>> candidates;
    bool budget_exhausted = false;
    std::size_t nodes = 0;
};

/// Layered dynamic program over (minute, cumulative level, SoC, mFRR request
/// state) plus the pricing digest of the country. Exact on the grid: every
/// profile that beats the incumbent price in the profit direction has a
/// candidate at least as good.
SearchOutcome search_grid(const SearchProblem& problem);

}  // namespace imbal::detail
