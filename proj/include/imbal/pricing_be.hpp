#pragma once

// Belgian single imbalance price: volume-weighted aFRR price of the
// regulation direction, extremized against the mFRR marginal when mFRR ran.

#include <cstdint>
#include <optional>
#include <string_view>

#include "imbal/quarter_simulation.hpp"

namespace imbal {

enum class BelgianBranch : std::uint8_t {
    Upward,           // shortage, no mFRR
    UpwardWithMfrr,   // shortage, max(vwap_up, mFRR marginal)
    Downward,         // surplus, no mFRR
    DownwardWithMfrr, // surplus, min(vwap_down, mFRR marginal)
};

std::string_view to_string(BelgianBranch b);

struct BelgianPriceBreakdown {
    std::optional<double> vwap_up;
    std::optional<double> vwap_down;
    std::optional<double> mfrr_marginal;  // extreme used by the branch
    double si_sign_basis = 0.0;           // > 0 surplus, <= 0 shortage
    BelgianBranch branch = BelgianBranch::Upward;
    /// Set when the branch direction had no aFRR activation and the
    /// mid-point of the best aFRR offers stood in for the VWAP.
    bool vwap_fallback = false;
    double final_price = 0.0;
};

/// Volume-weighted aFRR price over all minutes of the ISP in one direction.
/// Throws NoActivation when nothing was activated that way.
double vwap_afrr(const QuarterClearing& quarter, Direction direction);

/// Regulation direction of the ISP: minus the summed net aFRR volume.
/// Without delivered mFRR this equals the summed system imbalance after the
/// BRP's action.
double belgian_sign_basis(const QuarterClearing& quarter);

BelgianPriceBreakdown imbalance_price_be(const QuarterClearing& quarter);

}  // namespace imbal
