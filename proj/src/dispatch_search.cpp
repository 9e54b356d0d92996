#include "dispatch_search.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>

#include "imbal/errors.hpp"
#include "imbal/market_core.hpp"
#include "imbal/pricing_nl.hpp"
#include "imbal/settlement.hpp"

namespace imbal::detail {

namespace {

constexpr double kPriceEps = 1e-9;
constexpr int kMaxDinkelbachRounds = 200;

struct BudgetExhausted {};

// Everything the search needs from clearing one minute at one power level.
struct MinuteOutcome {
    bool feasible = false;
    MfrrLatch next;
    double afrr = 0.0;
    double mfrr = 0.0;
    double n_up = 0.0, d_up = 0.0;  // aFRR price*volume and volume, upward
    double n_dn = 0.0, d_dn = 0.0;
    std::optional<double> mfrr_marginal;
    std::optional<double> up_marginal;    // highest upward marginal this minute
    std::optional<double> down_marginal;  // lowest downward marginal this minute
};

std::int64_t quantize(double x, double scale) {
    return static_cast<std::int64_t>(std::llround(x * scale));
}

std::int64_t latch_code(const MfrrLatch& l) {
    return static_cast<std::int64_t>(l.phase) | (static_cast<std::int64_t>(l.direction) << 2) |
           (static_cast<std::int64_t>(l.request_minute + 1) << 3);
}

struct OutcomeKey {
    int minute;
    int level;
    std::int64_t latch;
    std::int64_t latch_volume;
    bool operator==(const OutcomeKey&) const = default;
};

struct OutcomeKeyHash {
    std::size_t operator()(const OutcomeKey& k) const noexcept {
        std::uint64_t h = static_cast<std::uint64_t>(k.minute) * 0x9E3779B97F4A7C15ULL;
        h ^= static_cast<std::uint64_t>(k.level + 4096) + 0x7F4A7C15ULL + (h << 6) + (h >> 2);
        h ^= static_cast<std::uint64_t>(k.latch) + 0x165667B1ULL + (h << 6) + (h >> 2);
        h ^= static_cast<std::uint64_t>(k.latch_volume) + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

class OutcomeCache {
public:
    OutcomeCache(const QuarterHourScenario& s, double step) : scenario_(s), step_(step) {}

    const MinuteOutcome& get(int minute, int level, const MfrrLatch& latch) {
        OutcomeKey key{minute, level, latch_code(latch), quantize(latch.requested_volume, 1e9)};
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(key, compute(minute, level, latch)).first->second;
    }

private:
    MinuteOutcome compute(int minute, int level, const MfrrLatch& latch) const {
        MinuteOutcome out;
        // Same arithmetic as DispatchProfile::from_net_injection + net_consumption.
        const double u = level * step_;
        const double consumption = u >= 0.0 ? 0.0 - u : -u - 0.0;
        MinuteState st{minute, scenario_.si_trace[static_cast<std::size_t>(minute)], consumption};
        MinuteStep step;
        try {
            step = clear_minute_in_quarter(st, scenario_.ladders, scenario_.mfrr_policy, latch);
        } catch (const VolumeExceedsLadder&) {
            return out;
        }
        const MinuteClearing& c = step.clearing;
        out.feasible = true;
        out.next = step.next;
        out.afrr = c.afrr_volume;
        out.mfrr = c.mfrr_volume;
        for (const auto& a : c.afrr_activations) {
            if (a.direction == Direction::Upward) {
                out.n_up += a.price * a.volume;
                out.d_up += a.volume;
            } else {
                out.n_dn += a.price * a.volume;
                out.d_dn += a.volume;
            }
        }
        out.mfrr_marginal = c.mfrr_marginal_price;
        auto consider = [&](double volume, const std::optional<double>& price) {
            if (!price) return;
            if (volume > kVolumeTolerance) {
                out.up_marginal = out.up_marginal ? std::max(*out.up_marginal, *price) : *price;
            } else if (volume < -kVolumeTolerance) {
                out.down_marginal =
                    out.down_marginal ? std::min(*out.down_marginal, *price) : *price;
            }
        };
        consider(c.afrr_volume, c.afrr_marginal_price);
        consider(c.mfrr_volume, c.mfrr_marginal_price);
        return out;
    }

    const QuarterHourScenario& scenario_;
    double step_;
    std::unordered_map<OutcomeKey, MinuteOutcome, OutcomeKeyHash> cache_;
};

// What a pass optimizes. Labels sharing a key are merged keeping the larger
// `value`; the key holds every quantity the final price depends on that is
// not monotone in `value`.
struct PassSpec {
    enum class Kind { BelgianRatio, BelgianMfrrExtreme, DutchExtreme };

    Kind kind = Kind::BelgianRatio;
    int sense = 1;                           // +1 maximize the price, -1 minimize
    Direction family = Direction::Upward;    // Belgian regulation direction
    double theta = 0.0;                      // Belgian ratio threshold
    bool mfrr_filter = false;                // every mFRR marginal must beat theta
    bool track_up = true;                    // Dutch: upward (U) or downward (L) extreme
};

struct Label {
    int cumk = 0, cum_c = 0, cum_d = 0;
    MfrrLatch latch;
    // Belgium
    double basis = 0.0;  // minus the running net aFRR volume
    double n = 0.0, d = 0.0;
    // running extreme marginal (mFRR for Belgium, U or L for the Netherlands)
    std::optional<double> ext;
    // Netherlands regulation-state digest
    bool has_up = false, has_dn = false, non_decreasing = true, non_increasing = true;
    bool started = false;
    double last_delta = 0.0;

    double value = 0.0;
    // Higher is better for the final regulation-direction test; only the
    // Belgian passes use it.
    std::int64_t rank = 0;
    bool dead = false;
    int parent = -1;
    int level = 0;
};

struct LabelKey {
    std::int64_t f[8];
    bool operator==(const LabelKey& o) const {
        return std::equal(std::begin(f), std::end(f), std::begin(o.f));
    }
};

struct LabelKeyHash {
    std::size_t operator()(const LabelKey& k) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (auto v : k.f) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 0x100000001b3ULL;
            h ^= h >> 29;
        }
        return static_cast<std::size_t>(h);
    }
};

class GridSearch {
public:
    explicit GridSearch(const SearchProblem& p)
        : p_(p),
          s_(*p.scenario),
          n_(s_.isp_length_minutes),
          k_(p.grid.levels_per_side),
          cache_(s_, p.grid.step) {
        const BessSpec& b = p.spec;
        const double travel = n_ * b.power_max * b.dt_hours / b.energy_max;
        track_soc_ = s_.initial_soc + travel * b.eta_charge > b.soc_max + 1e-9 ||
                     s_.initial_soc - travel / b.eta_discharge < b.soc_min - 1e-9;
        const auto& up = s_.ladders.afrr_up.best_price();
        const auto& dn = s_.ladders.afrr_down.best_price();
        if (up && dn) mid_ = 0.5 * (*up + *dn);
    }

    std::size_t nodes() const { return nodes_; }

    // Runs one layered pass and returns the final layer restricted to the
    // target position, plus the layers for path reconstruction.
    std::vector<Label> run(const PassSpec& spec) {
        layers_.assign(static_cast<std::size_t>(n_) + 1, {});
        layers_[0].push_back(Label{});
        for (int t = 0; t < n_; ++t) {
            // Labels sharing a key form a Pareto front over (value, basis
            // rank); a single label per key when the basis is not tracked.
            std::unordered_map<LabelKey, std::vector<int>, LabelKeyHash> index;
            auto& next = layers_[static_cast<std::size_t>(t) + 1];
            const auto& cur = layers_[static_cast<std::size_t>(t)];
            const int remaining = n_ - t - 1;
            for (std::size_t li = 0; li < cur.size(); ++li) {
                const Label& from = cur[li];
                if (from.dead) continue;
                for (int k = -k_; k <= k_; ++k) {
                    const int cumk = from.cumk + k;
                    if (std::abs(p_.grid.target_level_sum - cumk) > k_ * remaining) continue;
                    auto lbl = extend(from, t, k, spec);
                    if (!lbl) continue;
                    lbl->parent = static_cast<int>(li);
                    lbl->level = k;
                    lbl->rank = basis_rank(*lbl, spec);
                    auto& front = index[key_of(*lbl, spec)];
                    if (dominated(*lbl, front, next)) continue;
                    std::erase_if(front, [&](int i) {
                        Label& old = next[static_cast<std::size_t>(i)];
                        if (old.value <= lbl->value && old.rank <= lbl->rank) {
                            old.dead = true;
                            return true;
                        }
                        return false;
                    });
                    if (++nodes_ > p_.max_nodes) throw BudgetExhausted{};
                    front.push_back(static_cast<int>(next.size()));
                    next.push_back(std::move(*lbl));
                }
            }
        }
        std::vector<Label> finals;
        for (const auto& l : layers_.back()) {
            if (!l.dead && l.cumk == p_.grid.target_level_sum) finals.push_back(l);
        }
        return finals;
    }

    std::vector<int> path_of(const Label& final_label) const {
        std::vector<int> levels(static_cast<std::size_t>(n_));
        const Label* l = &final_label;
        for (int t = n_; t >= 1; --t) {
            levels[static_cast<std::size_t>(t) - 1] = l->level;
            if (t > 1) l = &layers_[static_cast<std::size_t>(t) - 1][static_cast<std::size_t>(l->parent)];
        }
        return levels;
    }

    std::optional<double> mid() const { return mid_; }

private:
    std::optional<Label> extend(const Label& from, int t, int k, const PassSpec& spec) {
        Label l;
        l.cumk = from.cumk + k;
        l.cum_c = from.cum_c + std::max(-k, 0);
        l.cum_d = from.cum_d + std::max(k, 0);
        if (track_soc_) {
            const BessSpec& b = p_.spec;
            const double step = p_.grid.step;
            double soc = s_.initial_soc + (b.eta_charge * step * l.cum_c -
                                           step * l.cum_d / b.eta_discharge) *
                                              b.dt_hours / b.energy_max;
            if (soc < b.soc_min - 1e-9 || soc > b.soc_max + 1e-9) return std::nullopt;
        }
        const MinuteOutcome& o = cache_.get(t, k, from.latch);
        if (!o.feasible) return std::nullopt;
        l.latch = o.next;

        switch (spec.kind) {
        case PassSpec::Kind::BelgianRatio: {
            if (spec.mfrr_filter && o.mfrr_marginal &&
                !(spec.sense * (*o.mfrr_marginal - spec.theta) > kPriceEps)) {
                return std::nullopt;
            }
            l.basis = from.basis - o.afrr;
            const bool up = spec.family == Direction::Upward;
            l.n = from.n + (up ? o.n_up : o.n_dn);
            l.d = from.d + (up ? o.d_up : o.d_dn);
            l.value = spec.sense * (l.n - spec.theta * l.d);
            break;
        }
        case PassSpec::Kind::BelgianMfrrExtreme: {
            l.basis = from.basis - o.afrr;
            l.d = from.d + (spec.family == Direction::Upward ? o.d_up : o.d_dn);
            l.ext = from.ext;
            if (o.mfrr_marginal) l.ext = combine(from.ext, *o.mfrr_marginal, spec.sense > 0);
            l.value = l.ext ? spec.sense * *l.ext : 0.0;
            break;
        }
        case PassSpec::Kind::DutchExtreme: {
            const double delta = o.afrr + o.mfrr;
            l.has_up = from.has_up || delta > kVolumeTolerance;
            l.has_dn = from.has_dn || delta < -kVolumeTolerance;
            l.non_decreasing = from.non_decreasing;
            l.non_increasing = from.non_increasing;
            if (from.started) {
                if (delta < from.last_delta - kVolumeTolerance) l.non_decreasing = false;
                if (delta > from.last_delta + kVolumeTolerance) l.non_increasing = false;
            }
            l.started = true;
            l.last_delta = delta;
            const auto& cand = spec.track_up ? o.up_marginal : o.down_marginal;
            l.ext = from.ext;
            // U is a running max, L a running min
            if (cand) l.ext = combine(from.ext, *cand, spec.track_up);
            l.value = l.ext ? spec.sense * *l.ext : 0.0;
            break;
        }
        }
        return l;
    }

    static double combine(const std::optional<double>& acc, double v, bool take_max) {
        if (!acc) return v;
        return take_max ? std::max(*acc, v) : std::min(*acc, v);
    }

    static bool belgian(const PassSpec& spec) { return spec.kind != PassSpec::Kind::DutchExtreme; }

    // The upward family needs a final basis <= 0, the downward one > 0, and
    // later minutes add the same amount to every label of a key.
    static std::int64_t basis_rank(const Label& l, const PassSpec& spec) {
        if (!belgian(spec)) return 0;
        const auto b = quantize(l.basis, 1e7);
        return spec.family == Direction::Upward ? -b : b;
    }

    // Ties keep the label that arrived first.
    static bool dominated(const Label& l, const std::vector<int>& front, const std::vector<Label>& layer) {
        for (int i : front) {
            const Label& o = layer[static_cast<std::size_t>(i)];
            if (o.value >= l.value && o.rank >= l.rank) return true;
        }
        return false;
    }

    LabelKey key_of(const Label& l, const PassSpec& spec) const {
        LabelKey key{};
        key.f[0] = l.cumk;
        key.f[1] = track_soc_ ? (static_cast<std::int64_t>(l.cum_c) << 20) + l.cum_d : 0;
        key.f[2] = latch_code(l.latch);
        key.f[3] = quantize(l.latch.requested_volume, 1e9);
        switch (spec.kind) {
        case PassSpec::Kind::BelgianRatio:
            key.f[5] = l.d > kVolumeTolerance ? 1 : 0;
            break;
        case PassSpec::Kind::BelgianMfrrExtreme:
            key.f[5] = (l.ext ? 1 : 0);
            break;
        case PassSpec::Kind::DutchExtreme: {
            const bool monotone_open = l.non_decreasing || l.non_increasing;
            key.f[4] = (l.has_up ? 1 : 0) | (l.has_dn ? 2 : 0) | (l.non_decreasing ? 4 : 0) |
                       (l.non_increasing ? 8 : 0) | (l.started ? 16 : 0) | (l.ext ? 32 : 0);
            key.f[5] = monotone_open ? quantize(l.last_delta, 1e7) : 0;
            break;
        }
        }
        return key;
    }

    const SearchProblem& p_;
    const QuarterHourScenario& s_;
    int n_;
    int k_;
    OutcomeCache cache_;
    bool track_soc_ = false;
    std::optional<double> mid_;
    std::size_t nodes_ = 0;
    std::vector<std::vector<Label>> layers_;
};

DispatchProfile profile_from_levels(const std::vector<int>& levels, double step) {
    std::vector<double> u;
    u.reserve(levels.size());
    for (int k : levels) u.push_back(k * step);
    return DispatchProfile::from_net_injection(u);
}

// Price of a level sequence through the real settlement, or nullopt if the
// market cannot clear it.
std::optional<double> settle_price(const SearchProblem& p, const std::vector<int>& levels) {
    try {
        return evaluate_dispatch(*p.scenario, profile_from_levels(levels, p.grid.step), p.country)
            .imbalance_price;
    } catch (const Error&) {
        return std::nullopt;
    }
}

RegulationState digest_state(const Label& l) {
    if (!l.has_up && !l.has_dn) return RegulationState::Zero;
    if (l.has_up && !l.has_dn) return RegulationState::Up;
    if (l.has_dn && !l.has_up) return RegulationState::Down;
    if (l.non_decreasing) return RegulationState::Up;
    if (l.non_increasing) return RegulationState::Down;
    return RegulationState::Dual;
}

void search_belgium(const SearchProblem& p, int sense, GridSearch& g, SearchOutcome& out) {
    for (Direction family : {Direction::Upward, Direction::Downward}) {
        const bool family_ok_up = family == Direction::Upward;
        auto in_family = [&](const Label& l) {
            const auto b = quantize(l.basis, 1e7);
            return family_ok_up ? b <= 0 : b > 0;
        };
        // Upward price is max(vwap, mFRR), downward is min(vwap, mFRR).
        // Improving a max from above, or a min from below, needs both terms
        // to improve; otherwise either term suffices.
        const bool both_terms = (family_ok_up && sense < 0) || (!family_ok_up && sense > 0);

        double theta = p.incumbent_price;
        for (int round = 0; round < kMaxDinkelbachRounds; ++round) {
            PassSpec spec;
            spec.kind = PassSpec::Kind::BelgianRatio;
            spec.sense = sense;
            spec.family = family;
            spec.theta = theta;
            spec.mfrr_filter = both_terms;
            auto finals = g.run(spec);

            const Label* best = nullptr;
            double best_score = 0.0;
            for (const auto& l : finals) {
                if (!in_family(l)) continue;
                double score;
                if (l.d > kVolumeTolerance) {
                    score = l.value;
                } else {
                    if (!g.mid()) continue;
                    score = sense * (*g.mid() - theta);
                }
                if (score > 1e-12 && (!best || score > best_score)) {
                    best = &l;
                    best_score = score;
                }
            }
            if (!best) break;
            auto levels = g.path_of(*best);
            auto price = settle_price(p, levels);
            if (!price || !(sense * (*price - theta) > 1e-12)) break;
            theta = *price;
            out.candidates.push_back(std::move(levels));
        }

        if (!both_terms) {
            PassSpec spec;
            spec.kind = PassSpec::Kind::BelgianMfrrExtreme;
            spec.sense = sense;
            spec.family = family;
            auto finals = g.run(spec);
            const Label* best = nullptr;
            for (const auto& l : finals) {
                if (!in_family(l) || !l.ext) continue;
                if (sense * (*l.ext - p.incumbent_price) <= 1e-12) continue;
                if (!best || l.value > best->value) best = &l;
            }
            if (best) out.candidates.push_back(g.path_of(*best));
        }
    }
}

void search_netherlands(const SearchProblem& p, int sense, GridSearch& g, SearchOutcome& out) {
    const double position = p.grid.rounded_position_mwh;
    for (bool track_up : {true, false}) {
        PassSpec spec;
        spec.kind = PassSpec::Kind::DutchExtreme;
        spec.sense = sense;
        spec.track_up = track_up;
        auto finals = g.run(spec);

        const Label* best = nullptr;
        double best_price = 0.0;
        for (const auto& l : finals) {
            if (!g.mid()) break;
            const double mid = *g.mid();
            std::optional<double> price;
            switch (digest_state(l)) {
            case RegulationState::Zero:
                price = mid;
                break;
            case RegulationState::Up:
                if (track_up) price = l.ext ? *l.ext : mid;
                break;
            case RegulationState::Down:
                if (!track_up) price = l.ext ? *l.ext : mid;
                break;
            case RegulationState::Dual:
                if (!l.ext) break;
                if (position < 0.0 && track_up) price = std::max(*l.ext, mid);
                if (position >= 0.0 && !track_up) price = std::min(*l.ext, mid);
                break;
            }
            if (!price) continue;
            if (!best || sense * (*price - best_price) > 0.0) {
                best = &l;
                best_price = *price;
            }
        }
        if (best && sense * (best_price - p.incumbent_price) > 1e-12) {
            out.candidates.push_back(g.path_of(*best));
        }
    }
}

}  // namespace

SearchOutcome search_grid(const SearchProblem& problem) {
    SearchOutcome out;
    const double position = problem.grid.rounded_position_mwh;
    if (position == 0.0) return out;  // every profile earns zero
    const int sense = position > 0.0 ? 1 : -1;

    GridSearch g(problem);
    try {
        if (problem.country == Country::Belgium) {
            search_belgium(problem, sense, g, out);
        } else {
            search_netherlands(problem, sense, g, out);
        }
    } catch (const BudgetExhausted&) {
        out.budget_exhausted = true;
    }
    out.nodes = g.nodes();
    return out;
}

}  // namespace imbal::detail
