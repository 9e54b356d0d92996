#include "imbal/market_core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "imbal/errors.hpp"

namespace imbal {

std::string_view to_string(Direction d) {
    return d == Direction::Upward ? "up" : "down";
}

std::string_view to_string(Product p) {
    return p == Product::aFRR ? "afrr" : "mfrr";
}

double BidLadder::total_capacity() const {
    double total = 0.0;
    for (const auto& b : bids) total += b.capacity;
    return total;
}

std::optional<double> BidLadder::best_price() const {
    if (bids.empty()) return std::nullopt;
    return bids.front().price;
}

std::string BidLadder::label() const {
    return std::string(to_string(product)) + "_" + std::string(to_string(direction));
}

void BidLadder::validate() const {
    for (std::size_t i = 0; i < bids.size(); ++i) {
        const Bid& b = bids[i];
        if (b.direction != direction || b.product != product) {
            throw ValidationError("ladder_membership",
                                  label() + ": bid '" + b.id + "' belongs to another ladder");
        }
        if (!std::isfinite(b.price)) {
            throw ValidationError("bid_price_finite", label() + ": bid '" + b.id + "'");
        }
        if (!std::isfinite(b.capacity) || b.capacity < 0.0) {
            throw ValidationError("bid_capacity_nonnegative", label() + ": bid '" + b.id + "'");
        }
        if (i > 0) {
            const Bid& prev = bids[i - 1];
            bool ordered = direction == Direction::Upward ? prev.price <= b.price
                                                          : prev.price >= b.price;
            if (!ordered) {
                throw ValidationError("merit_order", label() + ": bids '" + prev.id + "' and '" +
                                                         b.id + "' are out of merit order");
            }
        }
    }
}

const BidLadder& LadderSet::get(Product p, Direction d) const {
    if (p == Product::aFRR) return d == Direction::Upward ? afrr_up : afrr_down;
    return d == Direction::Upward ? mfrr_up : mfrr_down;
}

BidLadder& LadderSet::get(Product p, Direction d) {
    return const_cast<BidLadder&>(std::as_const(*this).get(p, d));
}

void LadderSet::validate() const {
    std::set<std::string> ids;
    for (const BidLadder* l : {&afrr_up, &afrr_down, &mfrr_up, &mfrr_down}) {
        l->validate();
        for (const auto& b : l->bids) {
            if (!ids.insert(b.id).second) {
                throw ValidationError("bid_id_unique", "duplicate bid id '" + b.id + "'");
            }
        }
    }
}

void MfrrPolicy::validate(int isp_length_minutes) const {
    if (lead_time_minutes < 0 || lead_time_minutes >= isp_length_minutes) {
        throw ValidationError("mfrr_lead_time",
                              "lead time " + std::to_string(lead_time_minutes) +
                                  " must lie in [0, " + std::to_string(isp_length_minutes) + ")");
    }
}

double required_balancing(const MinuteState& state) {
    return state.brp_net_consumption - state.system_imbalance;
}

MeritOrderFill activate_merit_order(const BidLadder& ladder, double volume) {
    if (volume < 0.0 || !std::isfinite(volume)) {
        throw std::invalid_argument("activate_merit_order: volume must be finite and >= 0");
    }
    MeritOrderFill fill;
    if (volume <= kVolumeTolerance * 1e-3) return fill;

    const double available = ladder.total_capacity();
    if (volume > available + kVolumeTolerance) {
        throw VolumeExceedsLadder(-1, ladder.label(), volume, available);
    }

    double remaining = volume;
    for (const auto& bid : ladder.bids) {
        if (remaining <= 0.0) break;
        if (bid.capacity <= 0.0) continue;
        double take = std::min(bid.capacity, remaining);
        remaining -= take;
        // absorb the tolerance slack into the last bid touched
        if (remaining <= kVolumeTolerance) {
            take += remaining;
            remaining = 0.0;
        }
        fill.activations.push_back({bid.id, ladder.direction, bid.price, take});
        fill.marginal_price = bid.price;
    }
    return fill;
}

double MinuteClearing::activation_cost() const {
    double cost = 0.0;
    for (const auto* list : {&afrr_activations, &mfrr_activations}) {
        for (const auto& a : *list) cost += sign_of(a.direction) * a.price * a.volume;
    }
    return cost;
}

namespace {

struct Capacities {
    double afrr_up;
    double afrr_down;
};

Capacities afrr_capacities(const LadderSet& ladders) {
    return {ladders.afrr_up.total_capacity(), ladders.afrr_down.total_capacity()};
}

double clamp_to_afrr(double residual, const Capacities& cap) {
    return std::clamp(residual, -cap.afrr_down, cap.afrr_up);
}

bool afrr_saturated(double residual, const Capacities& cap) {
    if (residual > kVolumeTolerance) return residual >= cap.afrr_up - kVolumeTolerance;
    if (residual < -kVolumeTolerance) return residual <= -cap.afrr_down + kVolumeTolerance;
    return false;
}

void fill_product(MinuteClearing& c, const LadderSet& ladders, Product product, double signed_volume) {
    if (std::abs(signed_volume) <= kVolumeTolerance * 1e-3) return;
    Direction d = signed_volume > 0.0 ? Direction::Upward : Direction::Downward;
    MeritOrderFill fill;
    try {
        fill = activate_merit_order(ladders.get(product, d), std::abs(signed_volume));
    } catch (const VolumeExceedsLadder& e) {
        throw e.at_minute(c.minute);
    }
    if (product == Product::aFRR) {
        c.afrr_activations = std::move(fill.activations);
        c.afrr_marginal_price = fill.marginal_price;
    } else {
        c.mfrr_activations = std::move(fill.activations);
        c.mfrr_marginal_price = fill.marginal_price;
    }
}

MinuteClearing base_clearing(const MinuteState& state) {
    MinuteClearing c;
    c.minute = state.minute;
    c.system_imbalance = state.system_imbalance;
    c.brp_net_consumption = state.brp_net_consumption;
    return c;
}

// aFRR clamped to its capacity; whatever is left stays unserved.
MinuteClearing clear_without_mfrr(const MinuteState& state, const LadderSet& ladders,
                                  const Capacities& cap, bool flag_active) {
    MinuteClearing c = base_clearing(state);
    double r = required_balancing(state);
    c.afrr_volume = clamp_to_afrr(r, cap);
    c.unserved_volume = r - c.afrr_volume;
    c.mfrr_active = flag_active;
    fill_product(c, ladders, Product::aFRR, c.afrr_volume);
    return c;
}

MinuteClearing clear_delivering(const MinuteState& state, const LadderSet& ladders,
                                const Capacities& cap, const MfrrPolicy& policy,
                                const MfrrLatch& latch) {
    MinuteClearing c = base_clearing(state);
    const double r = required_balancing(state);
    const double s = sign_of(latch.direction);
    const double cap_same = latch.direction == Direction::Upward ? cap.afrr_up : cap.afrr_down;
    const double need = std::max(0.0, s * r - cap_same);
    const double v = policy.latching ? std::max(latch.requested_volume, need) : need;

    c.mfrr_volume = s * v;
    double afrr = r - c.mfrr_volume;
    if (afrr > cap.afrr_up + kVolumeTolerance) {
        throw VolumeExceedsLadder(state.minute, "afrr_up", afrr, cap.afrr_up);
    }
    if (afrr < -cap.afrr_down - kVolumeTolerance) {
        throw VolumeExceedsLadder(state.minute, "afrr_down", -afrr, cap.afrr_down);
    }
    c.afrr_volume = std::clamp(afrr, -cap.afrr_down, cap.afrr_up);
    c.mfrr_active = policy.latching || v > kVolumeTolerance || afrr_saturated(r, cap);
    fill_product(c, ladders, Product::aFRR, c.afrr_volume);
    fill_product(c, ladders, Product::mFRR, c.mfrr_volume);
    return c;
}

}  // namespace

MinuteClearing clear_minute(const MinuteState& state, const LadderSet& ladders, bool mfrr_forced_on) {
    const Capacities cap = afrr_capacities(ladders);
    MinuteClearing c = base_clearing(state);
    const double r = required_balancing(state);
    c.afrr_volume = clamp_to_afrr(r, cap);
    c.mfrr_volume = r - c.afrr_volume;
    c.mfrr_active = mfrr_forced_on || afrr_saturated(r, cap);
    fill_product(c, ladders, Product::aFRR, c.afrr_volume);
    fill_product(c, ladders, Product::mFRR, c.mfrr_volume);
    return c;
}

MinuteStep clear_minute_in_quarter(const MinuteState& state, const LadderSet& ladders,
                                   const MfrrPolicy& policy, const MfrrLatch& latch) {
    const Capacities cap = afrr_capacities(ladders);
    const double r = required_balancing(state);
    MfrrLatch next = latch;

    switch (latch.phase) {
    case MfrrLatch::Phase::Idle: {
        if (!afrr_saturated(r, cap)) {
            return {clear_without_mfrr(state, ladders, cap, false), next};
        }
        next.phase = MfrrLatch::Phase::Pending;
        next.request_minute = state.minute;
        next.direction = r > 0.0 ? Direction::Upward : Direction::Downward;
        next.requested_volume = std::abs(r - clamp_to_afrr(r, cap));
        if (policy.lead_time_minutes == 0) {
            next.phase = MfrrLatch::Phase::Delivering;
            return {clear_delivering(state, ladders, cap, policy, next), next};
        }
        return {clear_without_mfrr(state, ladders, cap, true), next};
    }
    case MfrrLatch::Phase::Pending: {
        if (state.minute >= latch.request_minute + policy.lead_time_minutes) {
            next.phase = MfrrLatch::Phase::Delivering;
            return {clear_delivering(state, ladders, cap, policy, next), next};
        }
        return {clear_without_mfrr(state, ladders, cap, afrr_saturated(r, cap)), next};
    }
    case MfrrLatch::Phase::Delivering:
        return {clear_delivering(state, ladders, cap, policy, latch), next};
    }
    return {clear_without_mfrr(state, ladders, cap, false), next};
}

}  // namespace imbal
