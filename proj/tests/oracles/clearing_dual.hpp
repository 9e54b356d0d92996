#pragma once

// Minimum-cost clearing of one minute, solved through the Lagrangian dual of
//
//   min  sum_i c_i v_i   s.t.  sum_i s_i v_i = r,  0 <= v_i <= cap_i
//
// with s_i = +1 for upward and -1 for downward bids, c_i = s_i * price_i and
// a large penalty on every mFRR bid so aFRR is used first. The dual
//
//   g(l) = l r + sum_i cap_i min(0, c_i - l s_i)
//
// is concave and piecewise linear with kinks at l = c_i / s_i, so its
// maximum sits at one of those kinks. Strong duality gives the primal cost.

#include <algorithm>
#include <limits>
#include <vector>

#include "imbal/market_core.hpp"

namespace oracle {

inline constexpr double kMfrrPenalty = 1e6;

struct LpBid {
    double sign;
    double cost;  // per MW, penalty included
    double cap;
};

inline std::vector<LpBid> lp_bids(const imbal::LadderSet& ladders) {
    std::vector<LpBid> out;
    for (const imbal::BidLadder* l :
         {&ladders.afrr_up, &ladders.afrr_down, &ladders.mfrr_up, &ladders.mfrr_down}) {
        const double s = imbal::sign_of(l->direction);
        const double penalty = l->product == imbal::Product::mFRR ? kMfrrPenalty : 0.0;
        for (const auto& b : l->bids) out.push_back({s, s * b.price + penalty, b.capacity});
    }
    return out;
}

inline double dual_value(const std::vector<LpBid>& bids, double r, double lambda) {
    double g = lambda * r;
    for (const auto& b : bids) g += b.cap * std::min(0.0, b.cost - lambda * b.sign);
    return g;
}

/// Activation cost of the cheapest clearing of residual `r`, with the mFRR
/// volume forced to the part aFRR cannot cover. Requires non-crossing
/// ladders (every downward price below every upward price) so the LP never
/// activates both directions at once.
inline double min_activation_cost(const imbal::LadderSet& ladders, double r) {
    const auto bids = lp_bids(ladders);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& b : bids) best = std::max(best, dual_value(bids, r, b.cost / b.sign));
    if (bids.empty()) best = 0.0;

    double afrr_cap = r >= 0.0 ? ladders.afrr_up.total_capacity() : ladders.afrr_down.total_capacity();
    const double mfrr_volume = std::max(0.0, std::abs(r) - afrr_cap);
    return best - kMfrrPenalty * mfrr_volume;
}

}  // namespace oracle
