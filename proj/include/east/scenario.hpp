#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "east/geometry.hpp"

namespace east {

// Immutable problem instance. All quantities are SI linear internally
// (watts, meters); dB/dBm conversions happen only at the file boundary.
// Total power budgets are in watt-channel-uses: C5/C6 sum power-per-use
// times blocklength over the mission.
struct Scenario {
    Vec3 alice_pos{-700.0, 0.0, 0.0};
    Vec3 bob_pos{700.0, 0.0, 0.0};
    Vec3 eve_est_pos{-500.0, 900.0, 0.0};
    double eve_uncertainty = 10.0; // meters

    Vec3 uav_start{-500.0, -1000.0, 60.0};
    Vec3 uav_end{1000.0, 500.0, 60.0};

    double mission_time = 100.0;  // seconds
    double slot_duration = 1.0;   // seconds
    int n_slots = 100;            // derived: mission_time / slot_duration

    double bandwidth_hz = 1e6;    // only documents per-slot airtime l/W

    double p_tot_alice = 1.0;     // watt-uses over the mission
    double p_tot_uav = 1.0;       // watt-uses over the mission
    double p_max_alice = 0.1;     // watts per channel use (20 dBm)
    double p_max_uav = 0.1;       // watts per channel use (20 dBm)

    int l_max = 400;              // channel uses, end-to-end per slot

    double h_min = 60.0;          // meters
    double h_max = 120.0;         // meters
    double v_xy_max = 30.0;       // m/s
    double v_z_max = 5.0;         // m/s

    double beta0 = 1e-7;          // reference gain at 1 m (-70 dB)
    double alpha = 3.0;           // terrestrial path-loss exponent

    double noise_r = 1e-17;       // watts (-140 dBm)
    double noise_b = 1e-17;
    double noise_e = 1e-17;

    double eps_r = 1e-3;          // relay decoding error probability
    double eps_b = 1e-3;          // Bob decoding error probability
    double eta_e = 1e-2;          // information-leakage constraint

    double epsilon_conv = 1e-3;   // BSCA stop threshold, bits/s
    std::uint64_t rng_seed = 1;
};

/// The built-in default configuration.
Scenario default_scenario();

/// Every violated invariant, with the offending field names; empty when valid.
std::vector<std::string> validate(const Scenario& s);

/// Parse a scenario file; unspecified keys keep the built-in defaults.
/// Throws ParseError on malformed input, ValidationError if the result
/// violates an invariant.
Scenario load_scenario(const std::string& path);

/// Parse from an in-memory string (same schema as load_scenario).
Scenario parse_scenario(const std::string& text);

/// Serialize so that parse_scenario(serialize_scenario(s)) == s field-for-field.
std::string serialize_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

} // namespace east
