#include <doctest.h>

#include "helpers.hpp"
#include "imbal/battery.hpp"
#include "imbal/errors.hpp"
#include "imbal/settlement.hpp"
#include "oracles/random_scenarios.hpp"

using namespace imbal;

TEST_CASE("one minute of full charge or discharge moves SoC by the efficiency-scaled energy") {
    BessSpec spec;
    CHECK(soc_step(0.5, 10, 0, spec) == doctest::Approx(0.50791).epsilon(1e-5));
    CHECK(soc_step(0.5, 0, 10, spec) == doctest::Approx(0.49122).epsilon(1e-5));
    CHECK(soc_step(0.5, 0, 0, spec) == 0.5);
}

TEST_CASE("round trip efficiency is split evenly") {
    auto spec = BessSpec::with_round_trip(5, 10, 0.81);
    CHECK(spec.eta_charge == doctest::Approx(0.9));
    CHECK(spec.eta_discharge == doctest::Approx(0.9));
    CHECK(spec.power_max == 5.0);
}

TEST_CASE("battery validation rejects non-physical parameters") {
    BessSpec s;
    s.power_max = 0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = BessSpec{};
    s.soc_min = 0.8;
    s.soc_max = 0.2;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = BessSpec{};
    s.eta_charge = 1.2;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    CHECK_NOTHROW(BessSpec{}.validate());
}

TEST_CASE("feasibility checks") {
    BessSpec spec;
    CHECK_FALSE(check_feasible(DispatchProfile::zeros(15), 0.5, spec).has_value());

    auto v = check_feasible(DispatchProfile::from_net_injection(std::vector<double>(15, -1.0)), 1.0, spec);
    REQUIRE(v.has_value());
    CHECK(v->minute == 0);
    CHECK(v->constraint == FeasibilityViolation::Constraint::SocBound);

    auto d = check_feasible(DispatchProfile::from_net_injection(std::vector<double>(15, 10.0)), 0.10, spec);
    REQUIRE(d.has_value());
    CHECK(d->constraint == FeasibilityViolation::Constraint::SocBound);
    CHECK(d->minute == 11);

    auto over = DispatchProfile::zeros(15);
    over.steps[4].discharge = 10.5;
    auto p = check_feasible(over, 0.5, spec);
    REQUIRE(p.has_value());
    CHECK(p->constraint == FeasibilityViolation::Constraint::PowerBound);
    CHECK(p->minute == 4);

    auto both = DispatchProfile::zeros(15);
    both.steps[2] = {1.0, 1.0};
    CHECK(check_feasible(both, 0.5, spec)->constraint ==
          FeasibilityViolation::Constraint::SimultaneousChargeDischarge);

    CHECK(check_feasible(DispatchProfile::zeros(15), 1.5, spec)->constraint ==
          FeasibilityViolation::Constraint::InitialSoc);
}

TEST_CASE("position energy integrates net injection") {
    CHECK(position_energy(DispatchProfile::from_net_injection(std::vector<double>(15, 6.0)), 1.0 / 60) ==
          doctest::Approx(1.5));
    CHECK(position_energy(DispatchProfile::from_net_injection(std::vector<double>(15, -8.9)), 1.0 / 60) ==
          doctest::Approx(-2.225));
    std::vector<double> net(15, 0.0);
    net[0] = 10;
    net[1] = -10;
    CHECK(position_energy(DispatchProfile::from_net_injection(net), 1.0 / 60) == doctest::Approx(0.0));
}

TEST_CASE("uniform profile spreads the position evenly") {
    BessSpec spec;
    auto p = uniform_profile(-2.225, spec);
    REQUIRE(p.size() == 15);
    for (const auto& s : p.steps) {
        CHECK(s.charge == doctest::Approx(8.9));
        CHECK(s.discharge == 0.0);
    }
    CHECK(uniform_profile(0.0, spec) == DispatchProfile::zeros(15));
    CHECK_THROWS_AS(uniform_profile(2.51, spec), PowerInfeasible);
    CHECK_NOTHROW(uniform_profile(2.5, spec));
}

TEST_CASE("settlement profit is price times position") {
    // 20 MW surplus minus a 10 MW charge leaves 10 MW cleared at one bid.
    auto s = testing::flat_scenario(Country::Belgium, 0.0);
    s.ladders.afrr_down = testing::make_ladder(Product::aFRR, Direction::Downward, "ad", {{50, -100}});
    s.si_trace.assign(15, 20.0);
    auto r = evaluate_dispatch(s, uniform_profile(-2.5, BessSpec{}));
    CHECK(r.position_mwh == doctest::Approx(-2.5));
    CHECK(r.imbalance_price == doctest::Approx(-100.0));
    CHECK(r.profit == doctest::Approx(250.0));
}

TEST_CASE("Dutch settlement with no activation is state 0 and zero profit") {
    auto s = testing::flat_scenario(Country::Netherlands, 0.0);
    auto r = evaluate_dispatch(s, DispatchProfile::zeros(15));
    const auto& b = std::get<DutchPriceBreakdown>(r.breakdown);
    CHECK(b.state == RegulationState::Zero);
    CHECK(r.profit == 0.0);
    CHECK(r.imbalance_price == doctest::Approx(40.0));
}

TEST_CASE("SoC recursion matches closed form for constant power") {
    oracle::Rng rng(2);
    BessSpec spec;
    for (int i = 0; i < 500; ++i) {
        const double p = rng.uniform(-10, 10);
        const double soc0 = rng.uniform(0.3, 0.7);
        double soc = soc0;
        for (int t = 0; t < 15; ++t) soc = soc_step(soc, std::max(0.0, -p), std::max(0.0, p), spec);
        const double per_min = p < 0 ? -p * spec.eta_charge : -p / spec.eta_discharge;
        CHECK(soc == doctest::Approx(soc0 + 15 * per_min * spec.dt_hours / spec.energy_max));
    }
}
