#pragma once

#include "east/geometry.hpp"
#include "east/scenario.hpp"

namespace east::radio {

/// Normalized gains rho_j = beta0 / sigma^2_j.
struct LinkBudget {
    double rho_r = 0.0;
    double rho_b = 0.0;
    double rho_e = 0.0;
};

LinkBudget link_budget(const Scenario& s);

/// Per-slot SNRs: legitimate hops plus the worst-case eavesdropper values.
struct SlotSnr {
    double gamma_r = 0.0;       // Alice -> UAV
    double gamma_b = 0.0;       // UAV -> Bob
    double gamma_ae_bar = 0.0;  // Alice -> Eve, mean over fading, worst-case distance
    double gamma_re_tilde = 0.0; // UAV -> Eve, worst-case distance
};

/// LoS channel power gain beta0 / dist^2.
double los_gain(double dist_m, double beta0);

/// Mean terrestrial gain beta0 / dist^alpha (expectation over unit-mean
/// exponential fading), 2 < alpha <= 4.
double terrestrial_mean_gain(double dist_m, double beta0, double alpha);

/// Channel dispersion V(gamma) = (log2 e)^2 (1 - (1+gamma)^-2).
double dispersion(double gamma);

/// sqrt(1 - (1+gamma)^-2); dispersion without the (log2 e)^2 factor.
double dispersion_root(double gamma);

/// Inverse of Q(x) = integral_x^inf exp(-r^2/2)/sqrt(2 pi) dr,
/// |Q(q_inv(p)) - p| <= 1e-10 over (0, 1).
double q_inv(double p);

/// Complementary Gaussian CDF.
double q_func(double x);

/// Worst-case SNRs for one slot. Throws std::domain_error when a
/// worst-case Eve distance is not strictly positive: a waypoint inside the
/// uncertainty ball invalidates the lower bounds, so it is never clamped.
SlotSnr slot_snrs(const Scenario& s, Vec3 q_uav, double p_a, double p_r);

} // namespace east::radio
