#include "east/radio.hpp"

#include <cmath>
#include <stdexcept>

namespace east::radio {

namespace {
constexpr double kLog2E = 1.4426950408889634;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;

// Acklam's rational approximation to the inverse standard-normal CDF,
// used only to seed the Newton polish in q_inv.
double inv_norm_cdf_seed(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - plow) {
        double q = p - 0.5, r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}
} // namespace

LinkBudget link_budget(const Scenario& s) {
    return {s.beta0 / s.noise_r, s.beta0 / s.noise_b, s.beta0 / s.noise_e};
}

double los_gain(double dist_m, double beta0) {
    if (!(dist_m > 0.0)) throw std::domain_error("los_gain: dist must be > 0");
    return beta0 / (dist_m * dist_m);
}

double terrestrial_mean_gain(double dist_m, double beta0, double alpha) {
    if (!(dist_m > 0.0))
        throw std::domain_error("terrestrial_mean_gain: dist must be > 0");
    if (!(alpha > 2.0 && alpha <= 4.0))
        throw std::domain_error("terrestrial_mean_gain: alpha must lie in (2, 4]");
    return beta0 / std::pow(dist_m, alpha);
}

double dispersion_root(double gamma) {
    if (gamma < 0.0) throw std::domain_error("dispersion: gamma must be >= 0");
    double t = 1.0 + gamma;
    // 1 - t^-2 computed as gamma (2 + gamma) / t^2 to keep precision at small gamma
    return std::sqrt(gamma * (2.0 + gamma)) / t;
}

double dispersion(double gamma) {
    double r = dispersion_root(gamma);
    return kLog2E * kLog2E * r * r;
}

double q_func(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double q_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("q_inv: p must lie in (0, 1)");
    // Q(x) = 1 - Phi(x), so x = Phi^-1(1 - p); then polish on Q itself.
    double x = -inv_norm_cdf_seed(p);
    for (int i = 0; i < 8; ++i) {
        double err = q_func(x) - p;
        if (err == 0.0) break;
        double pdf = std::exp(-0.5 * x * x) / kSqrt2Pi;
        if (pdf <= 0.0) break;
        double step = err / pdf; // Q'(x) = -pdf
        if (std::abs(step) > 1.0) step = step > 0 ? 1.0 : -1.0;
        double xn = x + step;
        if (!std::isfinite(xn)) break;
        x = xn;
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

SlotSnr slot_snrs(const Scenario& s, Vec3 q_uav, double p_a, double p_r) {
    if (!(q_uav.z > 0.0))
        throw std::domain_error("slot_snrs: UAV must be strictly above ground");
    if (p_a < 0.0 || p_r < 0.0)
        throw std::domain_error("slot_snrs: powers must be nonnegative");
    LinkBudget lb = link_budget(s);
    double d_ra = distance(q_uav, s.alice_pos);
    double d_rb = distance(q_uav, s.bob_pos);
    double d_ae_wc = distance(s.alice_pos, s.eve_est_pos) - s.eve_uncertainty;
    double d_re_wc = distance(q_uav, s.eve_est_pos) - s.eve_uncertainty;
    if (!(d_ae_wc > 0.0) || !(d_re_wc > 0.0))
        throw std::domain_error(
            "slot_snrs: worst-case Eve distance not positive (inside the "
            "uncertainty ball)");
    SlotSnr r;
    r.gamma_r = p_a * lb.rho_r / (d_ra * d_ra);
    r.gamma_b = p_r * lb.rho_b / (d_rb * d_rb);
    r.gamma_ae_bar = p_a * lb.rho_e / std::pow(d_ae_wc, s.alpha);
    r.gamma_re_tilde = p_r * lb.rho_e / (d_re_wc * d_re_wc);
    return r;
}

} // namespace east::radio
