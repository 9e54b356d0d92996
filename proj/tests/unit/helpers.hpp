#pragma once

#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "imbal/quarter_simulation.hpp"
#include "imbal/scenario.hpp"

namespace testing {

using imbal::BidLadder;
using imbal::Direction;
using imbal::Product;

inline BidLadder make_ladder(Product p, Direction d, const std::string& prefix,
                             std::initializer_list<std::pair<double, double>> cap_price) {
    BidLadder l{d, p, {}};
    int i = 0;
    for (auto [cap, price] : cap_price) {
        l.bids.push_back({prefix + std::to_string(++i), d, p, price, cap});
    }
    return l;
}

/// Deep ladders on both sides: aFRR 20 MW each way, mFRR 100 MW each way.
inline imbal::LadderSet wide_ladders() {
    imbal::LadderSet s;
    s.afrr_up = make_ladder(Product::aFRR, Direction::Upward, "au", {{10, 50}, {10, 100}});
    s.afrr_down = make_ladder(Product::aFRR, Direction::Downward, "ad", {{10, 30}, {10, -20}});
    s.mfrr_up = make_ladder(Product::mFRR, Direction::Upward, "mu", {{50, 150}, {50, 250}});
    s.mfrr_down = make_ladder(Product::mFRR, Direction::Downward, "md", {{50, -60}, {50, -150}});
    return s;
}

inline imbal::QuarterHourScenario flat_scenario(imbal::Country c, double si, int minutes = 15) {
    imbal::QuarterHourScenario s;
    s.id = "flat";
    s.country = c;
    s.isp_length_minutes = minutes;
    s.si_trace.assign(static_cast<std::size_t>(minutes), si);
    s.ladders = wide_ladders();
    s.mfrr_policy.lead_time_minutes = std::min(3, minutes - 1);
    return s;
}


/// Minute with one aFRR activation (signed volume, + = upward).
inline imbal::MinuteClearing afrr_minute(int t, double volume, double price) {
    imbal::MinuteClearing m;
    m.minute = t;
    m.afrr_volume = volume;
    if (volume != 0.0) {
        const auto d = volume > 0 ? Direction::Upward : Direction::Downward;
        m.afrr_activations.push_back({"b" + std::to_string(t), d, price, std::abs(volume)});
        m.afrr_marginal_price = price;
    }
    return m;
}

inline imbal::QuarterClearing quarter_of(std::vector<imbal::MinuteClearing> minutes,
                                         double best_up = 50.0, double best_down = 30.0) {
    imbal::QuarterClearing q;
    q.minutes = std::move(minutes);
    q.afrr_up_best_price = best_up;
    q.afrr_down_best_price = best_down;
    for (const auto& m : q.minutes) q.any_mfrr = q.any_mfrr || m.mfrr_active;
    return q;
}

}  // namespace testing
