#include "imbal/battery.hpp"

#include <sstream>

#include "imbal/errors.hpp"

namespace imbal {

namespace {
constexpr double kPowerTolerance = 1e-9;
constexpr double kSocTolerance = 1e-9;
}  // namespace

BessSpec BessSpec::with_round_trip(double power_max, double energy_max, double round_trip) {
    BessSpec spec;
    spec.power_max = power_max;
    spec.energy_max = energy_max;
    spec.eta_charge = std::sqrt(round_trip);
    spec.eta_discharge = std::sqrt(round_trip);
    return spec;
}

void BessSpec::validate() const {
    if (!(power_max > 0.0) || !std::isfinite(power_max)) {
        throw ValidationError("bess_power_max", "power_max must be > 0");
    }
    if (!(energy_max > 0.0) || !std::isfinite(energy_max)) {
        throw ValidationError("bess_energy_max", "energy_max must be > 0");
    }
    if (!(0.0 <= soc_min && soc_min <= soc_max && soc_max <= 1.0)) {
        throw ValidationError("bess_soc_bounds", "need 0 <= soc_min <= soc_max <= 1");
    }
    if (!(eta_charge > 0.0 && eta_charge <= 1.0) || !(eta_discharge > 0.0 && eta_discharge <= 1.0)) {
        throw ValidationError("bess_efficiency", "efficiencies must lie in (0, 1]");
    }
    if (!(dt_hours > 0.0)) throw ValidationError("bess_dt", "dt must be > 0");
}

DispatchProfile DispatchProfile::from_net_injection(std::span<const double> power_mw) {
    DispatchProfile p;
    p.steps.reserve(power_mw.size());
    for (double u : power_mw) {
        p.steps.push_back(u >= 0.0 ? DispatchStep{0.0, u} : DispatchStep{-u, 0.0});
    }
    return p;
}

DispatchProfile DispatchProfile::zeros(int minutes) {
    DispatchProfile p;
    p.steps.assign(static_cast<std::size_t>(minutes), DispatchStep{});
    return p;
}

std::vector<double> DispatchProfile::net_injection() const {
    std::vector<double> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.net_injection());
    return out;
}

double soc_step(double soc, double p_charge, double p_discharge, const BessSpec& spec) {
    return soc + (p_charge * spec.eta_charge - p_discharge / spec.eta_discharge) * spec.dt_hours /
                     spec.energy_max;
}

std::string_view to_string(FeasibilityViolation::Constraint c) {
    using C = FeasibilityViolation::Constraint;
    switch (c) {
    case C::InitialSoc: return "initial_soc";
    case C::NegativePower: return "negative_power";
    case C::PowerBound: return "power_bound";
    case C::SimultaneousChargeDischarge: return "simultaneous_charge_discharge";
    case C::SocBound: return "soc_bound";
    }
    return "unknown";
}

std::optional<FeasibilityViolation> check_feasible(const DispatchProfile& profile, double soc0,
                                                   const BessSpec& spec) {
    using C = FeasibilityViolation::Constraint;
    if (soc0 < spec.soc_min - kSocTolerance || soc0 > spec.soc_max + kSocTolerance) {
        return FeasibilityViolation{0, C::InitialSoc, soc0};
    }
    double soc = soc0;
    for (std::size_t i = 0; i < profile.steps.size(); ++i) {
        const int t = static_cast<int>(i);
        const auto& s = profile.steps[i];
        if (s.charge < 0.0) return FeasibilityViolation{t, C::NegativePower, s.charge};
        if (s.discharge < 0.0) return FeasibilityViolation{t, C::NegativePower, s.discharge};
        if (s.charge > 0.0 && s.discharge > 0.0) {
            return FeasibilityViolation{t, C::SimultaneousChargeDischarge, s.charge};
        }
        if (s.charge > spec.power_max + kPowerTolerance) {
            return FeasibilityViolation{t, C::PowerBound, s.charge};
        }
        if (s.discharge > spec.power_max + kPowerTolerance) {
            return FeasibilityViolation{t, C::PowerBound, s.discharge};
        }
        soc = soc_step(soc, s.charge, s.discharge, spec);
        if (soc < spec.soc_min - kSocTolerance || soc > spec.soc_max + kSocTolerance) {
            return FeasibilityViolation{t, C::SocBound, soc};
        }
    }
    return std::nullopt;
}

double position_energy(const DispatchProfile& profile, double dt_hours) {
    double e = 0.0;
    for (const auto& s : profile.steps) e += s.net_injection() * dt_hours;
    return e;
}

DispatchProfile uniform_profile(double position_mwh, const BessSpec& spec, int isp_minutes) {
    const double power = position_mwh / (isp_minutes * spec.dt_hours);
    if (std::abs(power) > spec.power_max + kPowerTolerance) {
        std::ostringstream os;
        os << "position " << position_mwh << " MWh needs " << std::abs(power)
           << " MW over the ISP, battery is rated " << spec.power_max << " MW";
        throw PowerInfeasible(os.str());
    }
    std::vector<double> u(static_cast<std::size_t>(isp_minutes), power);
    return DispatchProfile::from_net_injection(u);
}

}  // namespace imbal
