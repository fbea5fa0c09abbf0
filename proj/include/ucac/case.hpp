#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucac {

/// Raised when a case file cannot be parsed at all.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a parsed case violates model invariants. Carries every
/// violation found, not just the first.
struct ValidationError : std::runtime_error {
    explicit ValidationError(std::vector<std::string> issues_);
    std::vector<std::string> issues;
};

struct Bus {
    int id = 0;
    double v_min = 0.9;   // p.u.
    double v_max = 1.1;   // p.u.
    double g_sh = 0.0;    // p.u. shunt conductance
    double b_sh = 0.0;    // p.u. shunt susceptance
};

struct Branch {
    int id = 0;
    int from_bus = 0;  // index into NetworkCase::buses
    int to_bus = 0;
    double r = 0.0;       // series resistance, p.u.
    double x = 0.0;       // series reactance, p.u.
    double b_charge = 0.0;  // total charging susceptance, p.u.
    double tap = 1.0;       // off-nominal tap ratio
    double shift = 0.0;     // phase shift, rad
    double s_max = 0.0;     // apparent power limit, p.u.
    double theta_max = 1.5707963267948966;  // angle difference bound, rad
};

struct StartupSegment {
    int hours_offline = 1;  // segment applies when offline >= this many hours
    double cost = 0.0;      // $
};

struct Generator {
    std::string name;
    int bus = 0;  // index into buses
    // cost(p) = a2*p^2 + a1*p + a0 with p in p.u. after normalization
    double cost_a2 = 0.0;
    double cost_a1 = 0.0;
    double cost_a0 = 0.0;
    double p_min = 0.0, p_max = 0.0;  // p.u.
    double q_min = 0.0, q_max = 0.0;  // p.u.
    double ramp_up = 0.0, ramp_down = 0.0;      // p.u./h
    double startup_cap = 0.0, shutdown_cap = 0.0;  // p.u.
    int min_up = 1, min_down = 1;  // h
    std::vector<StartupSegment> startup;  // ordered, hours strictly increasing
    double shutdown_cost = 0.0;
    // signed hours before t=1: positive = on that long, negative = off
    int initial_status = -1;
    double initial_output = 0.0;  // p.u.
};

struct SyncCondenser {
    int bus = 0;
    double q_min = 0.0, q_max = 0.0;  // p.u.
};

/// Real/imaginary parts of the four pi-model admittance blocks of one branch.
struct AdmittanceBlocks {
    double g_ff = 0, b_ff = 0;
    double g_ft = 0, b_ft = 0;
    double g_tf = 0, b_tf = 0;
    double g_tt = 0, b_tt = 0;
};

/// Immutable problem instance. All electrical quantities are per-unit on
/// base_mva once loaded; costs are $ per p.u. quantity per hour.
struct NetworkCase {
    std::string name;
    double base_mva = 100.0;
    int horizon = 0;  // T
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Generator> generators;
    std::vector<SyncCondenser> condensers;
    // demand[b][t], p.u.
    std::vector<std::vector<double>> demand_p;
    std::vector<std::vector<double>> demand_q;
    std::vector<double> reserve;  // per period, p.u.

    int num_buses() const { return static_cast<int>(buses.size()); }
    int num_branches() const { return static_cast<int>(branches.size()); }
    int num_generators() const { return static_cast<int>(generators.size()); }
    int num_condensers() const { return static_cast<int>(condensers.size()); }
};

/// Parse and validate the canonical case JSON ("ucac-case-1"), converting
/// physical units to per-unit on baseMVA.
NetworkCase load_case(const std::string& path);
NetworkCase parse_case_json(const std::string& text, const std::string& origin = "<string>");

/// Collects every invariant violation; empty result means the case is valid.
std::vector<std::string> validate_case(const NetworkCase& c);

/// Pi-model admittance blocks for one branch. Throws std::invalid_argument
/// for zero-impedance branches or non-positive tap.
AdmittanceBlocks branch_admittance(const Branch& br);

/// Inverse of the loader's normalization, for round-trip checks: returns
/// the case with demand, limits, ramps and cost coefficients back in
/// physical units (MW, MVAr, $/MWh).
NetworkCase denormalize_case(const NetworkCase& c);

}  // namespace ucac
