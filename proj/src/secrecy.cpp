#include "east/secrecy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "east/planner.hpp"
#include "east/rng.hpp"

namespace east::secrecy {

namespace {
constexpr double kLog2E = 1.4426950408889634;

double log2_1p(double x) { return std::log1p(x) * kLog2E; }

double rate_lb_raw(double gamma_main, double gamma_eve, double l, double eps,
                   double eta) {
    if (!(l >= 1.0)) throw std::domain_error("rate_lb: blocklength must be >= 1");
    double inv_sqrt_l = 1.0 / std::sqrt(l);
    return log2_1p(gamma_main) -
           kLog2E * radio::dispersion_root(gamma_main) * inv_sqrt_l * radio::q_inv(eps) -
           log2_1p(gamma_eve) -
           kLog2E * radio::dispersion_root(gamma_eve) * inv_sqrt_l * radio::q_inv(eta);
}
} // namespace

double uplink_rate_lb_raw(const radio::SlotSnr& snr, double l_u, double eps_r,
                          double eta_e) {
    return rate_lb_raw(snr.gamma_r, snr.gamma_ae_bar, l_u, eps_r, eta_e);
}

double uplink_rate_lb(const radio::SlotSnr& snr, double l_u, double eps_r,
                      double eta_e) {
    return std::max(0.0, uplink_rate_lb_raw(snr, l_u, eps_r, eta_e));
}

double downlink_rate_lb_raw(const radio::SlotSnr& snr, double l_d, double eps_b,
                            double eta_e) {
    return rate_lb_raw(snr.gamma_b, snr.gamma_re_tilde, l_d, eps_b, eta_e);
}

double downlink_rate_lb(const radio::SlotSnr& snr, double l_d, double eps_b,
                        double eta_e) {
    return std::max(0.0, downlink_rate_lb_raw(snr, l_d, eps_b, eta_e));
}

double slot_throughput(double r_u, double r_d, double l_u, double l_d,
                       double eps_r, double eps_b, double delta_t) {
    if (!(delta_t > 0.0)) throw std::domain_error("slot_throughput: delta_t must be > 0");
    if (!(l_u >= 1.0 && l_d >= 1.0))
        throw std::domain_error("slot_throughput: blocklengths must be >= 1");
    double bits = std::min(r_u * l_u * (1.0 - eps_r), r_d * l_d * (1.0 - eps_b));
    return std::max(0.0, bits) / delta_t;
}

SlotRates slot_rates(const Scenario& s, Vec3 q_uav, double p_a, double p_r,
                     double l_u, double l_d) {
    radio::SlotSnr snr = radio::slot_snrs(s, q_uav, p_a, p_r);
    SlotRates r;
    r.r_u_lb = uplink_rate_lb(snr, l_u, s.eps_r, s.eta_e);
    r.r_d_lb = downlink_rate_lb(snr, l_d, s.eps_b, s.eta_e);
    r.c_u_inf = std::max(0.0, log2_1p(snr.gamma_r) - log2_1p(snr.gamma_ae_bar));
    r.c_d_inf = std::max(0.0, log2_1p(snr.gamma_b) - log2_1p(snr.gamma_re_tilde));
    r.b_s = slot_throughput(r.r_u_lb, r.r_d_lb, l_u, l_d, s.eps_r, s.eps_b,
                            s.slot_duration);
    return r;
}

double east(const Scenario& s, const planner::DecisionVariables& dv) {
    double total = 0.0;
    for (int n = 0; n < s.n_slots; ++n) {
        SlotRates r = slot_rates(s, dv.q_r[n], dv.p_a[n], dv.p_r[n], dv.l_u[n],
                                 dv.l_d[n]);
        total += r.b_s;
    }
    return total / s.n_slots;
}

McEstimate mc_uplink_rate(const Scenario& s, Vec3 q_uav, double p_a, double l_u,
                          std::int64_t n_samples, std::uint64_t seed,
                          double zeta_override) {
    if (n_samples < 1000)
        throw std::domain_error("mc_uplink_rate: need at least 1e3 samples");
    radio::SlotSnr snr = radio::slot_snrs(s, q_uav, p_a, 0.0);
    double qe = radio::q_inv(s.eps_r);
    double qh = radio::q_inv(s.eta_e);
    double inv_sqrt_l = 1.0 / std::sqrt(l_u);
    double disp_r = kLog2E * radio::dispersion_root(snr.gamma_r) * inv_sqrt_l * qe;
    double cap_r = log2_1p(snr.gamma_r);

    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t i = 0; i < n_samples; ++i) {
        double zeta = zeta_override >= 0.0
                          ? zeta_override
                          : rng::exponential1(seed, 0x4d43u /*"MC"*/, static_cast<std::uint64_t>(i));
        double g_ae = snr.gamma_ae_bar * zeta;
        double v = cap_r - disp_r - log2_1p(g_ae) -
                   kLog2E * radio::dispersion_root(g_ae) * inv_sqrt_l * qh;
        v = std::max(0.0, v);
        sum += v;
        sumsq += v * v;
    }
    McEstimate est;
    est.n_samples = n_samples;
    est.mean = sum / static_cast<double>(n_samples);
    double var = std::max(0.0, sumsq / static_cast<double>(n_samples) - est.mean * est.mean);
    est.stderr_ = std::sqrt(var / static_cast<double>(n_samples));
    return est;
}

} // namespace east::secrecy
