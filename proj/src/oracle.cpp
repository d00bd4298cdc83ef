#include "east/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "east/rng.hpp"
#include "east/secrecy.hpp"

namespace east::oracle {

GridOptimum grid_optimum_single_slot(const Scenario& s, Vec3 q_uav,
                                     const GridSpec& grid) {
    if (s.n_slots != 1)
        throw std::invalid_argument("grid_optimum_single_slot: needs an N = 1 scenario");
    const int n_lu = (s.l_max - 1 + grid.l_u_step - 1) / grid.l_u_step;
    std::int64_t total = static_cast<std::int64_t>(grid.n_p_a) * grid.n_p_r * n_lu;
    if (total > grid.max_points)
        throw std::invalid_argument("grid_optimum_single_slot: grid exceeds max_points");

    radio::SlotSnr unit = radio::slot_snrs(s, q_uav, 1.0, 1.0); // SNR per watt

    GridOptimum best;
    best.east = -1.0;
    for (int ia = 0; ia < grid.n_p_a; ++ia) {
        double p_a = s.p_max_alice * ia / (grid.n_p_a - 1);
        for (int ir = 0; ir < grid.n_p_r; ++ir) {
            double p_r = s.p_max_uav * ir / (grid.n_p_r - 1);
            for (int lu = 1; lu <= s.l_max - 1; lu += grid.l_u_step) {
                int ld = s.l_max - lu;
                // C5/C6 with N = 1
                if (p_a * lu > s.p_tot_alice || p_r * ld > s.p_tot_uav) continue;
                radio::SlotSnr snr;
                snr.gamma_r = unit.gamma_r * p_a;
                snr.gamma_b = unit.gamma_b * p_r;
                snr.gamma_ae_bar = unit.gamma_ae_bar * p_a;
                snr.gamma_re_tilde = unit.gamma_re_tilde * p_r;
                double ru = secrecy::uplink_rate_lb(snr, lu, s.eps_r, s.eta_e);
                double rd = secrecy::downlink_rate_lb(snr, ld, s.eps_b, s.eta_e);
                double b = secrecy::slot_throughput(ru, rd, lu, ld, s.eps_r,
                                                    s.eps_b, s.slot_duration);
                if (b > best.east) {
                    best.east = b;
                    best.p_a = p_a;
                    best.p_r = p_r;
                    best.l_u = lu;
                    best.l_d = ld;
                }
            }
        }
    }
    return best;
}

BoundAudit sampled_bound_audit(const Scenario& s,
                               const planner::DecisionVariables& dv,
                               int n_eve_samples, std::uint64_t seed) {
    radio::LinkBudget lb = radio::link_budget(s);
    BoundAudit audit;
    audit.worst_margin = std::numeric_limits<double>::infinity();

    for (int k = 0; k < n_eve_samples; ++k) {
        // Uniform sample in the 3D uncertainty ball around the estimate.
        double gx = radio::q_inv(rng::uniform01(seed, 1, 3 * k));
        double gy = radio::q_inv(rng::uniform01(seed, 1, 3 * k + 1));
        double gz = radio::q_inv(rng::uniform01(seed, 1, 3 * k + 2));
        double gn = std::sqrt(gx * gx + gy * gy + gz * gz);
        double radius =
            s.eve_uncertainty * std::cbrt(rng::uniform01(seed, 2, k));
        Vec3 q_e = s.eve_est_pos;
        if (gn > 0.0)
            q_e = s.eve_est_pos + (radius / gn) * Vec3{gx, gy, gz};

        double d_ae = distance(s.alice_pos, q_e);
        for (int n = 0; n < s.n_slots; ++n) {
            radio::SlotSnr wc = radio::slot_snrs(s, dv.q_r[n], dv.p_a[n], dv.p_r[n]);
            radio::SlotSnr actual = wc;
            actual.gamma_ae_bar =
                dv.p_a[n] * lb.rho_e / std::pow(d_ae, s.alpha);
            actual.gamma_re_tilde =
                dv.p_r[n] * lb.rho_e /
                std::pow(distance(dv.q_r[n], q_e), 2.0);

            double mu = secrecy::uplink_rate_lb(actual, dv.l_u[n], s.eps_r, s.eta_e) -
                        secrecy::uplink_rate_lb(wc, dv.l_u[n], s.eps_r, s.eta_e);
            double md = secrecy::downlink_rate_lb(actual, dv.l_d[n], s.eps_b, s.eta_e) -
                        secrecy::downlink_rate_lb(wc, dv.l_d[n], s.eps_b, s.eta_e);
            double m = std::min(mu, md);
            if (m < audit.worst_margin) {
                audit.worst_margin = m;
                audit.worst_slot = n;
            }
        }
    }
    return audit;
}

} // namespace east::oracle
