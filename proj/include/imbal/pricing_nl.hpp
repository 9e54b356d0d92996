#pragma once

// Dutch imbalance price: regulation state classification and marginal
// pricing with dual pricing in state 2.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "imbal/quarter_simulation.hpp"

namespace imbal {

enum class RegulationState : int { Zero = 0, Up = 1, Down = -1, Dual = 2 };

std::string_view to_string(RegulationState s);

struct MarginalPrices {
    std::optional<double> up;    // highest upward marginal over activated minutes
    std::optional<double> down;  // lowest downward marginal over activated minutes
    double mid = 0.0;
};

struct DutchPriceBreakdown {
    std::optional<double> lambda_up;
    std::optional<double> lambda_down;
    double lambda_mid = 0.0;
    RegulationState state = RegulationState::Zero;
    double final_price_long = 0.0;   // applies to E_position >= 0
    double final_price_short = 0.0;  // applies to E_position < 0
    double brp_price = 0.0;          // side the BRP actually faces
    /// State +1/-1 without a defined marginal in that direction; mid used.
    bool mid_fallback = false;
};

/// Net activated FRR per minute (upward minus downward, aFRR + mFRR).
std::vector<double> balance_deltas(const QuarterClearing& quarter);

/// 0: no activation; +1: only upward, or both with non-decreasing deltas;
/// -1: only downward, or both with non-increasing deltas; 2 otherwise.
RegulationState regulation_state(std::span<const double> deltas);

/// Throws EmptyLadder if either aFRR ladder is empty (no mid price).
MarginalPrices marginal_prices(const QuarterClearing& quarter);

/// `position_mwh` follows the BRP convention: + = net injection (surplus).
DutchPriceBreakdown imbalance_price_nl(const QuarterClearing& quarter, double position_mwh);

}  // namespace imbal
