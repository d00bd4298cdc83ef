#pragma once

#include <cstdint>
#include <vector>

#include "east/radio.hpp"
#include "east/scenario.hpp"

namespace east::planner {
struct DecisionVariables;
}

namespace east::secrecy {

/// Finite- and infinite-blocklength secrecy rates of one slot plus the
/// resulting effective secrecy throughput.
struct SlotRates {
    double r_u_lb = 0.0;   // uplink lower bound, bits/use, clipped at 0
    double r_d_lb = 0.0;   // downlink lower bound, bits/use, clipped at 0
    double c_u_inf = 0.0;  // infinite-blocklength secrecy capacity, clipped
    double c_d_inf = 0.0;
    double b_s = 0.0;      // effective secrecy throughput, bits/s
};

/// Closed-form uplink secrecy-rate lower bound, clipped below at 0.
double uplink_rate_lb(const radio::SlotSnr& snr, double l_u, double eps_r, double eta_e);
/// Same value without the clip (the planner's slack tau uses this form).
double uplink_rate_lb_raw(const radio::SlotSnr& snr, double l_u, double eps_r, double eta_e);

double downlink_rate_lb(const radio::SlotSnr& snr, double l_d, double eps_b, double eta_e);
double downlink_rate_lb_raw(const radio::SlotSnr& snr, double l_d, double eps_b, double eta_e);

/// min of the two hops' secure-bit counts divided by the slot period.
double slot_throughput(double r_u, double r_d, double l_u, double l_d,
                       double eps_r, double eps_b, double delta_t);

SlotRates slot_rates(const Scenario& s, Vec3 q_uav, double p_a, double p_r,
                     double l_u, double l_d);

/// Effective average secrecy throughput of a full decision set, bits/s.
double east(const Scenario& s, const planner::DecisionVariables& dv);

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t n_samples = 0;
};

/// Monte-Carlo estimate of the exact uplink secrecy rate (expectation over
/// unit-mean exponential fading on Alice->Eve with the clip inside), using
/// the worst-case Eve distance. zeta_override < 0 samples the fading;
/// otherwise the fading gain is pinned to that value (test hook).
McEstimate mc_uplink_rate(const Scenario& s, Vec3 q_uav, double p_a, double l_u,
                          std::int64_t n_samples, std::uint64_t seed,
                          double zeta_override = -1.0);

} // namespace east::secrecy
