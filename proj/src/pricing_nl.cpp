#include "imbal/pricing_nl.hpp"

#include <algorithm>
#include <cmath>

#include "imbal/errors.hpp"

namespace imbal {

std::string_view to_string(RegulationState s) {
    switch (s) {
    case RegulationState::Zero: return "0";
    case RegulationState::Up: return "+1";
    case RegulationState::Down: return "-1";
    case RegulationState::Dual: return "2";
    }
    return "?";
}

std::vector<double> balance_deltas(const QuarterClearing& quarter) {
    std::vector<double> deltas;
    deltas.reserve(quarter.minutes.size());
    for (const auto& m : quarter.minutes) deltas.push_back(m.afrr_volume + m.mfrr_volume);
    return deltas;
}

RegulationState regulation_state(std::span<const double> deltas) {
    bool up = false;
    bool down = false;
    bool non_decreasing = true;
    bool non_increasing = true;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        up = up || deltas[i] > kVolumeTolerance;
        down = down || deltas[i] < -kVolumeTolerance;
        if (i > 0) {
            if (deltas[i] < deltas[i - 1] - kVolumeTolerance) non_decreasing = false;
            if (deltas[i] > deltas[i - 1] + kVolumeTolerance) non_increasing = false;
        }
    }
    if (!up && !down) return RegulationState::Zero;
    if (up && !down) return RegulationState::Up;
    if (down && !up) return RegulationState::Down;
    if (non_decreasing) return RegulationState::Up;
    if (non_increasing) return RegulationState::Down;
    return RegulationState::Dual;
}

MarginalPrices marginal_prices(const QuarterClearing& quarter) {
    if (!quarter.afrr_up_best_price || !quarter.afrr_down_best_price) {
        throw EmptyLadder("mid price needs both aFRR ladders to be non-empty");
    }
    MarginalPrices out;
    out.mid = 0.5 * (*quarter.afrr_up_best_price + *quarter.afrr_down_best_price);

    auto consider = [&](double volume, const std::optional<double>& price) {
        if (!price) return;
        if (volume > kVolumeTolerance) {
            out.up = out.up ? std::max(*out.up, *price) : *price;
        } else if (volume < -kVolumeTolerance) {
            out.down = out.down ? std::min(*out.down, *price) : *price;
        }
    };
    for (const auto& m : quarter.minutes) {
        consider(m.afrr_volume, m.afrr_marginal_price);
        consider(m.mfrr_volume, m.mfrr_marginal_price);
    }
    return out;
}

DutchPriceBreakdown imbalance_price_nl(const QuarterClearing& quarter, double position_mwh) {
    const MarginalPrices mp = marginal_prices(quarter);
    const auto deltas = balance_deltas(quarter);

    DutchPriceBreakdown out;
    out.lambda_up = mp.up;
    out.lambda_down = mp.down;
    out.lambda_mid = mp.mid;
    out.state = regulation_state(deltas);

    double single = mp.mid;
    switch (out.state) {
    case RegulationState::Zero:
        break;
    case RegulationState::Up:
        if (mp.up) single = *mp.up; else out.mid_fallback = true;
        break;
    case RegulationState::Down:
        if (mp.down) single = *mp.down; else out.mid_fallback = true;
        break;
    case RegulationState::Dual:
        if (!mp.up || !mp.down) {
            throw MissingMarginal("regulation state 2 without marginals in both directions");
        }
        out.final_price_short = std::max(*mp.up, mp.mid);
        out.final_price_long = std::min(*mp.down, mp.mid);
        out.brp_price = position_mwh < 0.0 ? out.final_price_short : out.final_price_long;
        return out;
    }
    out.final_price_long = single;
    out.final_price_short = single;
    out.brp_price = single;
    return out;
}

}  // namespace imbal
