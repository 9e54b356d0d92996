#pragma once

// Battery state-of-charge dynamics and dispatch profiles for one ISP.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace imbal {

struct BessSpec {
    double power_max = 10.0;   // MW
    double energy_max = 20.0;  // MWh
    double soc_min = 0.0;
    double soc_max = 1.0;
    double eta_charge = std::sqrt(0.9);
    double eta_discharge = std::sqrt(0.9);
    double dt_hours = 1.0 / 60.0;

    /// Splits a round-trip efficiency evenly between charge and discharge.
    static BessSpec with_round_trip(double power_max, double energy_max, double round_trip);

    void validate() const;

    bool operator==(const BessSpec&) const = default;
};

struct DispatchStep {
    double charge = 0.0;     // MW >= 0
    double discharge = 0.0;  // MW >= 0

    double net_injection() const { return discharge - charge; }
    double net_consumption() const { return charge - discharge; }

    bool operator==(const DispatchStep&) const = default;
};

struct DispatchProfile {
    std::vector<DispatchStep> steps;

    /// Builds a profile from signed battery power (+ = discharge).
    static DispatchProfile from_net_injection(std::span<const double> power_mw);
    static DispatchProfile zeros(int minutes);

    std::vector<double> net_injection() const;
    std::size_t size() const { return steps.size(); }

    bool operator==(const DispatchProfile&) const = default;
};

double soc_step(double soc, double p_charge, double p_discharge, const BessSpec& spec);

struct FeasibilityViolation {
    enum class Constraint : std::uint8_t {
        InitialSoc,
        NegativePower,
        PowerBound,
        SimultaneousChargeDischarge,
        SocBound,
    };

    int minute = 0;
    Constraint constraint = Constraint::SocBound;
    double value = 0.0;  // the offending power or SoC
};

std::string_view to_string(FeasibilityViolation::Constraint c);

/// First violated constraint along the profile, or nullopt if feasible.
/// SoC bounds are checked after every step.
std::optional<FeasibilityViolation> check_feasible(const DispatchProfile& profile, double soc0,
                                                   const BessSpec& spec);

/// Net ISP energy in MWh; positive means net injection.
double position_energy(const DispatchProfile& profile, double dt_hours);

/// Constant-power profile delivering `position_mwh` over the ISP.
/// Throws PowerInfeasible if that power exceeds the battery rating.
DispatchProfile uniform_profile(double position_mwh, const BessSpec& spec, int isp_minutes = 15);

}  // namespace imbal
