#include "imbal/settlement.hpp"

namespace imbal {

SettlementResult evaluate_dispatch(const QuarterHourScenario& scenario,
                                   const DispatchProfile& profile, Country country) {
    SettlementResult r;
    r.country = country;
    r.clearing = simulate_quarter(scenario, profile);
    r.position_mwh = position_energy(profile, scenario.dt_hours);
    if (country == Country::Belgium) {
        auto be = imbalance_price_be(r.clearing);
        r.imbalance_price = be.final_price;
        r.breakdown = be;
    } else {
        auto nl = imbalance_price_nl(r.clearing, r.position_mwh);
        r.imbalance_price = nl.brp_price;
        r.breakdown = nl;
    }
    r.profit = r.imbalance_price * r.position_mwh;
    return r;
}

}  // namespace imbal
