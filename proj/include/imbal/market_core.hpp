#pragma once

// Minute-resolution merit-order clearing of aFRR and mFRR bid ladders.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imbal {

/// Volumes below this are treated as "no activation".
inline constexpr double kVolumeTolerance = 1e-9;

enum class Direction { Upward, Downward };
enum class Product { aFRR, mFRR };

std::string_view to_string(Direction d);
std::string_view to_string(Product p);

/// +1 for upward, -1 for downward.
inline double sign_of(Direction d) { return d == Direction::Upward ? 1.0 : -1.0; }
inline Direction opposite(Direction d) {
    return d == Direction::Upward ? Direction::Downward : Direction::Upward;
}

struct Bid {
    std::string id;
    Direction direction = Direction::Upward;
    Product product = Product::aFRR;
    double price = 0.0;     // EUR/MWh
    double capacity = 0.0;  // MW

    bool operator==(const Bid&) const = default;
};

/// Bids of one product and direction in merit order: upward ascending by
/// price, downward descending by price. Equal prices keep their file order.
struct BidLadder {
    Direction direction = Direction::Upward;
    Product product = Product::aFRR;
    std::vector<Bid> bids;

    double total_capacity() const;
    bool empty() const { return bids.empty(); }

    /// Cheapest upward / highest-paying downward price, if any bid exists.
    std::optional<double> best_price() const;

    /// Throws ValidationError on unsorted ladders, negative or non-finite
    /// capacities, non-finite prices and product/direction mismatches.
    void validate() const;

    std::string label() const;

    bool operator==(const BidLadder&) const = default;
};

struct LadderSet {
    BidLadder afrr_up{Direction::Upward, Product::aFRR, {}};
    BidLadder afrr_down{Direction::Downward, Product::aFRR, {}};
    BidLadder mfrr_up{Direction::Upward, Product::mFRR, {}};
    BidLadder mfrr_down{Direction::Downward, Product::mFRR, {}};

    const BidLadder& get(Product p, Direction d) const;
    BidLadder& get(Product p, Direction d);

    void validate() const;

    bool operator==(const LadderSet&) const = default;
};

struct MfrrPolicy {
    int lead_time_minutes = 3;
    bool latching = true;

    void validate(int isp_length_minutes) const;

    bool operator==(const MfrrPolicy&) const = default;
};

struct MinuteState {
    int minute = 0;
    double system_imbalance = 0.0;     // MW, + = surplus
    double brp_net_consumption = 0.0;  // MW, p_charge - p_discharge
};

/// Signed balancing need: positive asks for upward activation.
double required_balancing(const MinuteState& state);

struct Activation {
    std::string bid_id;
    Direction direction = Direction::Upward;
    double price = 0.0;
    double volume = 0.0;  // MW, always >= 0

    bool operator==(const Activation&) const = default;
};

struct MeritOrderFill {
    std::vector<Activation> activations;
    std::optional<double> marginal_price;
};

/// Fills `ladder` in merit order until `volume` MW is met.
/// Throws VolumeExceedsLadder when the ladder cannot cover the volume.
MeritOrderFill activate_merit_order(const BidLadder& ladder, double volume);

struct MinuteClearing {
    int minute = 0;
    double system_imbalance = 0.0;
    double brp_net_consumption = 0.0;
    double afrr_volume = 0.0;      // signed, + = upward
    double mfrr_volume = 0.0;      // signed, + = upward
    double unserved_volume = 0.0;  // overflow waiting on an mFRR lead time
    std::vector<Activation> afrr_activations;
    std::vector<Activation> mfrr_activations;
    std::optional<double> afrr_marginal_price;
    std::optional<double> mfrr_marginal_price;
    bool mfrr_active = false;

    /// Objective of the clearing LP: upward bids cost mu*b, downward bids
    /// pay back mu*b.
    double activation_cost() const;

    bool operator==(const MinuteClearing&) const = default;
};

/// Single-minute clearing with aFRR priority: aFRR takes the residual up to
/// its capacity, mFRR only the overflow. `mfrr_forced_on` marks the minute as
/// mFRR-active even without saturation.
MinuteClearing clear_minute(const MinuteState& state, const LadderSet& ladders,
                            bool mfrr_forced_on);

/// Per-ISP mFRR request state carried from one minute to the next.
struct MfrrLatch {
    enum class Phase : std::uint8_t { Idle, Pending, Delivering };

    Phase phase = Phase::Idle;
    int request_minute = -1;
    Direction direction = Direction::Upward;
    double requested_volume = 0.0;  // MW at the trigger minute

    bool operator==(const MfrrLatch&) const = default;
};

struct MinuteStep {
    MinuteClearing clearing;
    MfrrLatch next;
};

/// Clears one minute inside an ISP given the mFRR request state.
///
/// Idle: a saturated aFRR direction files an mFRR request for the overflow.
/// Pending: until `lead_time_minutes` after the request, overflow stays
/// unserved. Delivering: with latching, mFRR delivers at least the requested
/// volume until ISP end and aFRR balances the remainder (possibly in the
/// opposite direction); without latching, mFRR only takes overflow.
MinuteStep clear_minute_in_quarter(const MinuteState& state, const LadderSet& ladders,
                                   const MfrrPolicy& policy, const MfrrLatch& latch);

}  // namespace imbal
