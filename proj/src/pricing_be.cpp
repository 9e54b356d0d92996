#include "imbal/pricing_be.hpp"

#include <algorithm>
#include <cmath>

#include "imbal/errors.hpp"

namespace imbal {

std::string_view to_string(BelgianBranch b) {
    switch (b) {
    case BelgianBranch::Upward: return "upward";
    case BelgianBranch::UpwardWithMfrr: return "upward_with_mfrr";
    case BelgianBranch::Downward: return "downward";
    case BelgianBranch::DownwardWithMfrr: return "downward_with_mfrr";
    }
    return "unknown";
}

namespace {

std::optional<double> try_vwap(const QuarterClearing& quarter, Direction direction) {
    double weighted = 0.0;
    double volume = 0.0;
    for (const auto& m : quarter.minutes) {
        for (const auto& a : m.afrr_activations) {
            if (a.direction != direction) continue;
            weighted += a.price * a.volume;
            volume += a.volume;
        }
    }
    if (volume <= kVolumeTolerance) return std::nullopt;
    return weighted / volume;
}

}  // namespace

double vwap_afrr(const QuarterClearing& quarter, Direction direction) {
    auto v = try_vwap(quarter, direction);
    if (!v) {
        throw NoActivation("no " + std::string(to_string(direction)) +
                           "ward aFRR activation in the ISP");
    }
    return *v;
}

double belgian_sign_basis(const QuarterClearing& quarter) {
    double basis = 0.0;
    for (const auto& m : quarter.minutes) basis -= m.afrr_volume;
    return basis;
}

BelgianPriceBreakdown imbalance_price_be(const QuarterClearing& quarter) {
    BelgianPriceBreakdown out;
    out.vwap_up = try_vwap(quarter, Direction::Upward);
    out.vwap_down = try_vwap(quarter, Direction::Downward);
    out.si_sign_basis = belgian_sign_basis(quarter);

    const bool shortage = out.si_sign_basis <= 0.0;
    std::optional<double> base = shortage ? out.vwap_up : out.vwap_down;
    if (!base) {
        if (!quarter.afrr_up_best_price || !quarter.afrr_down_best_price) {
            throw NoActivation("no aFRR activation in the price-setting direction and no aFRR "
                               "offers to fall back on");
        }
        base = 0.5 * (*quarter.afrr_up_best_price + *quarter.afrr_down_best_price);
        out.vwap_fallback = true;
    }

    if (quarter.any_mfrr) {
        for (const auto& m : quarter.minutes) {
            if (!m.mfrr_marginal_price) continue;
            double p = *m.mfrr_marginal_price;
            if (!out.mfrr_marginal) {
                out.mfrr_marginal = p;
            } else {
                out.mfrr_marginal = shortage ? std::max(*out.mfrr_marginal, p)
                                             : std::min(*out.mfrr_marginal, p);
            }
        }
    }

    if (shortage) {
        out.branch = quarter.any_mfrr ? BelgianBranch::UpwardWithMfrr : BelgianBranch::Upward;
        out.final_price = out.mfrr_marginal ? std::max(*base, *out.mfrr_marginal) : *base;
    } else {
        out.branch = quarter.any_mfrr ? BelgianBranch::DownwardWithMfrr : BelgianBranch::Downward;
        out.final_price = out.mfrr_marginal ? std::min(*base, *out.mfrr_marginal) : *base;
    }
    return out;
}

}  // namespace imbal
