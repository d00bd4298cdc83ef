#include "east/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "east/errors.hpp"
#include "east/sca_atoms.hpp"
#include "east/secrecy.hpp"

namespace east::planner {

using sca::AffineAtom;
using sca::AffineExpr;
using sca::ConvexProgram;
using sca::LogAffineAtom;
using sca::LogRatioAtom;
using sca::NormAffineAtom;
using sca::QuadOverAffineAtom;
using sca::Rel;
using sca::VarRef;

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kLog2E = 1.4426950408889634;
constexpr double kSlackFloor = 1e-9;       // positivity guard for slack variables
constexpr double kPowerExpansionFloor = 1e-6; // times p_max, for a0/a1 tangents
constexpr double kDegeneratePower = 1e-9;  // times p_max: hop treated as silent

// Unclipped secure bits admitted by each hop in one slot.
double bits_uplink(const Scenario& s, const radio::SlotSnr& snr, double l_u) {
    return secrecy::uplink_rate_lb_raw(snr, l_u, s.eps_r, s.eta_e) * l_u *
           (1.0 - s.eps_r);
}
double bits_downlink(const Scenario& s, const radio::SlotSnr& snr, double l_d) {
    return secrecy::downlink_rate_lb_raw(snr, l_d, s.eps_b, s.eta_e) * l_d *
           (1.0 - s.eps_b);
}

void rederive_tau(const Scenario& s, DecisionVariables& dv) {
    for (int n = 0; n < s.n_slots; ++n) {
        radio::SlotSnr snr = radio::slot_snrs(s, dv.q_r[n], dv.p_a[n], dv.p_r[n]);
        dv.tau[n] = std::min(bits_uplink(s, snr, dv.l_u[n]),
                             bits_downlink(s, snr, dv.l_d[n]));
    }
}

std::string slot_tag(const char* name, int n) {
    return std::string(name) + "[" + std::to_string(n) + "]";
}

} // namespace

double ConstraintResiduals::max_c1_to_c9() const {
    return std::max({c1, c2, c3, c4, c5, c6, c7, c8, c9});
}

DecisionVariables initial_feasible(const Scenario& s) {
    auto violations = validate(s);
    if (!violations.empty())
        throw ValidationError("initial_feasible: invalid scenario: " + violations[0]);

    const int n = s.n_slots;
    DecisionVariables dv;
    dv.p_a.resize(n);
    dv.p_r.resize(n);
    dv.l_u.resize(n);
    dv.l_d.resize(n);
    dv.q_r.resize(n);
    dv.tau.resize(n);

    double l0 = std::floor(s.l_max / 2.0);
    double p0a = std::min(s.p_max_alice, s.p_tot_alice / (n * l0));
    double p0r = std::min(s.p_max_uav, s.p_tot_uav / (n * l0));
    for (int i = 0; i < n; ++i) {
        double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        dv.q_r[i] = s.uav_start + t * (s.uav_end - s.uav_start);
        dv.l_u[i] = l0;
        dv.l_d[i] = l0;
        dv.p_a[i] = p0a;
        dv.p_r[i] = p0r;
    }
    rederive_tau(s, dv);
    return dv;
}

PowerCoeffs power_coeffs_uplink(const Scenario& s, Vec3 q, double l_u, double p_lo) {
    radio::LinkBudget lb = radio::link_budget(s);
    double d_ra = distance(q, s.alice_pos);
    double d_ae = distance(s.alice_pos, s.eve_est_pos) - s.eve_uncertainty;
    PowerCoeffs c;
    c.k1 = lb.rho_r / (d_ra * d_ra);
    c.k2 = lb.rho_e / std::pow(d_ae, s.alpha);
    c.k3 = radio::q_inv(s.eps_r) / std::sqrt(l_u);
    c.k4 = radio::q_inv(s.eta_e) / std::sqrt(l_u);
    c.k5 = kLn2 / (l_u * (1.0 - s.eps_r));
    c.k6 = c.k2 > 0.0 ? c.k2 / (1.0 + c.k2 * p_lo) : 0.0;
    c.k7 = c.k2 > 0.0 ? std::log1p(c.k2 * p_lo) - c.k6 * p_lo : 0.0;
    return c;
}

PowerCoeffs power_coeffs_downlink(const Scenario& s, Vec3 q, double l_d, double p_lo) {
    radio::LinkBudget lb = radio::link_budget(s);
    double d_rb = distance(q, s.bob_pos);
    double d_re = distance(q, s.eve_est_pos) - s.eve_uncertainty;
    PowerCoeffs c;
    c.k1 = lb.rho_b / (d_rb * d_rb);
    c.k2 = lb.rho_e / (d_re * d_re);
    c.k3 = radio::q_inv(s.eps_b) / std::sqrt(l_d);
    c.k4 = radio::q_inv(s.eta_e) / std::sqrt(l_d);
    c.k5 = kLn2 / (l_d * (1.0 - s.eps_b));
    c.k6 = c.k2 > 0.0 ? c.k2 / (1.0 + c.k2 * p_lo) : 0.0;
    c.k7 = c.k2 > 0.0 ? std::log1p(c.k2 * p_lo) - c.k6 * p_lo : 0.0;
    return c;
}

BlocklengthCoeffs blocklength_coeffs(double gamma_main, double gamma_eve,
                                     double eps, double eta) {
    BlocklengthCoeffs c;
    c.a0 = (1.0 - eps) * (std::log1p(gamma_main) - std::log1p(gamma_eve)) * kLog2E;
    c.a1 = (1.0 - eps) * kLog2E *
           (radio::dispersion_root(gamma_main) * radio::q_inv(eps) +
            radio::dispersion_root(gamma_eve) * radio::q_inv(eta));
    return c;
}

// ---------------------------------------------------------------------------
// Power subproblem: per-slot transmit powers of both hops
// ---------------------------------------------------------------------------

namespace {
// Per-slot variable order in the power program.
enum PowerVar { PA = 0, PR, PTAU, SA, SR, NUA, NUR, kPowerVars };
} // namespace

ConvexProgram build_power_subproblem(const Scenario& s,
                                     const DecisionVariables& dv) {
    const int N = s.n_slots;
    ConvexProgram prog;
    prog.tags.reserve(N * kPowerVars);

    // Warm start: shrink powers multiplicatively so tight budgets and peak
    // bounds become strict, then floor away exact zeros.
    std::vector<double> pa_ws(N), pr_ws(N);
    double shrink = 1.0 - 1e-4;
    for (int rep = 0; rep < 4; ++rep) {
        double sum_a = 0.0, sum_r = 0.0;
        for (int n = 0; n < N; ++n) {
            pa_ws[n] = std::max(dv.p_a[n] * shrink, kDegeneratePower * s.p_max_alice);
            pr_ws[n] = std::max(dv.p_r[n] * shrink, kDegeneratePower * s.p_max_uav);
            sum_a += pa_ws[n] * dv.l_u[n];
            sum_r += pr_ws[n] * dv.l_d[n];
        }
        if (sum_a < s.p_tot_alice && sum_r < s.p_tot_uav) break;
        shrink = 1.0 - (1.0 - shrink) * 10.0;
    }

    for (int n = 0; n < N; ++n) {
        prog.add_var(slot_tag("p_a", n), 0.0, s.p_max_alice, pa_ws[n]);
        prog.add_var(slot_tag("p_r", n), 0.0, s.p_max_uav, pr_ws[n]);
        prog.add_var(slot_tag("tau", n), -sca::kInf, sca::kInf, 0.0);
        prog.add_var(slot_tag("s_a", n), kSlackFloor, sca::kInf, 1.0);
        prog.add_var(slot_tag("s_r", n), kSlackFloor, sca::kInf, 1.0);
        prog.add_var(slot_tag("nu_a", n), kSlackFloor, sca::kInf, 1.0);
        prog.add_var(slot_tag("nu_r", n), kSlackFloor, sca::kInf, 1.0);
    }
    auto var = [&](int n, PowerVar v) { return VarRef{n * kPowerVars + v}; };

    for (int n = 0; n < N; ++n) {
        prog.set_objective(var(n, PTAU), 1.0);

        struct Hop {
            PowerVar p, sv, nv;
            PowerCoeffs c;
            double p_lo, p_ws;
        };
        double plo_a = std::max(dv.p_a[n], kPowerExpansionFloor * s.p_max_alice);
        double plo_r = std::max(dv.p_r[n], kPowerExpansionFloor * s.p_max_uav);
        Hop hops[2] = {
            {PA, SA, NUA, power_coeffs_uplink(s, dv.q_r[n], dv.l_u[n], plo_a),
             plo_a, pa_ws[n]},
            {PR, SR, NUR, power_coeffs_downlink(s, dv.q_r[n], dv.l_d[n], plo_r),
             plo_r, pr_ws[n]},
        };

        double tau_cap = sca::kInf;
        for (const Hop& h : hops) {
            const PowerCoeffs& c = h.c;
            if (!std::isfinite(c.k1) || !std::isfinite(c.k2) || !std::isfinite(c.k6) ||
                !std::isfinite(c.k7) || c.k1 <= 0.0)
                throw ValidationError("build_power_subproblem: non-finite constants");

            // s-tangent: ln s + ln(1 + k1 p) >= A0 + A1 (p - p_lo)
            sca::Tangent t1 =
                sca::tangent_of_concave(sca::ConcaveFn::half_log_kx_2kx, h.p_lo, c.k1);
            {
                LogAffineAtom a;
                a.logs.push_back({1.0, AffineExpr().add(var(n, h.sv), 1.0)});
                a.logs.push_back(
                    {1.0, AffineExpr(1.0).add(var(n, h.p), c.k1)});
                a.tail.add(var(n, h.p), -t1.slope).add_const(-t1.intercept);
                prog.add_atom(std::move(a));
            }
            double s_req =
                std::exp(t1.at(h.p_ws) - std::log1p(c.k1 * h.p_ws));
            double s_ws = std::max(s_req * (1.0 + 1e-4), 2.0 * kSlackFloor);
            prog.warm_start[var(n, h.sv).index] = s_ws;

            // nu-tangent: ln nu + ln(1 + k2 p) >= A0 + A1 (p - p_lo)
            double nu_ws = 2.0 * kSlackFloor;
            if (c.k2 > 0.0) {
                sca::Tangent t2 = sca::tangent_of_concave(
                    sca::ConcaveFn::half_log_kx_2kx, h.p_lo, c.k2);
                LogAffineAtom a;
                a.logs.push_back({1.0, AffineExpr().add(var(n, h.nv), 1.0)});
                a.logs.push_back({1.0, AffineExpr(1.0).add(var(n, h.p), c.k2)});
                a.tail.add(var(n, h.p), -t2.slope).add_const(-t2.intercept);
                prog.add_atom(std::move(a));
                double nu_req =
                    std::exp(t2.at(h.p_ws) - std::log1p(c.k2 * h.p_ws));
                nu_ws = std::max(nu_req * (1.0 + 1e-4), 2.0 * kSlackFloor);
            }
            prog.warm_start[var(n, h.nv).index] = nu_ws;

            // main: ln(1 + k1 p) >= k3 s + k4 nu + k5 tau + k6 p + k7
            {
                LogAffineAtom a;
                a.logs.push_back({1.0, AffineExpr(1.0).add(var(n, h.p), c.k1)});
                a.tail.add(var(n, h.sv), -c.k3)
                    .add(var(n, h.nv), -c.k4)
                    .add(var(n, PTAU), -c.k5)
                    .add(var(n, h.p), -c.k6)
                    .add_const(-c.k7);
                prog.add_atom(std::move(a));
            }
            double cap = (std::log1p(c.k1 * h.p_ws) - c.k3 * s_ws - c.k4 * nu_ws -
                          c.k6 * h.p_ws - c.k7) /
                         c.k5;
            tau_cap = std::min(tau_cap, cap);
        }
        prog.warm_start[var(n, PTAU).index] =
            tau_cap - 0.02 * (1.0 + std::abs(tau_cap));
    }

    // C5 / C6 total power budgets (blocklengths fixed).
    {
        AffineAtom c5;
        c5.rel = Rel::le;
        for (int n = 0; n < N; ++n) c5.expr.add(var(n, PA), dv.l_u[n]);
        c5.expr.add_const(-s.p_tot_alice);
        prog.add_atom(std::move(c5));
        AffineAtom c6;
        c6.rel = Rel::le;
        for (int n = 0; n < N; ++n) c6.expr.add(var(n, PR), dv.l_d[n]);
        c6.expr.add_const(-s.p_tot_uav);
        prog.add_atom(std::move(c6));
    }
    return prog;
}

// ---------------------------------------------------------------------------
// Blocklength subproblem: per-slot uplink/downlink channel uses
// ---------------------------------------------------------------------------

namespace {
enum LenVar { LU = 0, LD, LTAU, kLenVars };
} // namespace

ConvexProgram build_blocklength_subproblem(const Scenario& s,
                                           const DecisionVariables& dv) {
    const int N = s.n_slots;
    ConvexProgram prog;

    std::vector<double> lu_ws(N), ld_ws(N);
    double shrink = 1e-6;
    for (int rep = 0; rep < 4; ++rep) {
        bool ok = true;
        double sum_a = 0.0, sum_r = 0.0;
        for (int n = 0; n < N; ++n) {
            lu_ws[n] = std::max(dv.l_u[n] * (1.0 - shrink), 1.0 + shrink / 2.0);
            ld_ws[n] = std::max(dv.l_d[n] * (1.0 - shrink), 1.0 + shrink / 2.0);
            if (lu_ws[n] + ld_ws[n] >= s.l_max) ok = false;
            sum_a += dv.p_a[n] * lu_ws[n];
            sum_r += dv.p_r[n] * ld_ws[n];
        }
        if (ok && sum_a < s.p_tot_alice && sum_r < s.p_tot_uav) break;
        shrink *= 10.0;
    }

    for (int n = 0; n < N; ++n) {
        prog.add_var(slot_tag("l_u", n), 1.0, sca::kInf, lu_ws[n]);
        prog.add_var(slot_tag("l_d", n), 1.0, sca::kInf, ld_ws[n]);
        prog.add_var(slot_tag("tau", n), -sca::kInf, sca::kInf, 0.0);
    }
    auto var = [&](int n, LenVar v) { return VarRef{n * kLenVars + v}; };

    for (int n = 0; n < N; ++n) {
        prog.set_objective(var(n, LTAU), 1.0);
        radio::SlotSnr snr = radio::slot_snrs(s, dv.q_r[n], dv.p_a[n], dv.p_r[n]);
        BlocklengthCoeffs cu =
            blocklength_coeffs(snr.gamma_r, snr.gamma_ae_bar, s.eps_r, s.eta_e);
        BlocklengthCoeffs cd =
            blocklength_coeffs(snr.gamma_b, snr.gamma_re_tilde, s.eps_b, s.eta_e);
        if (!std::isfinite(cu.a0) || !std::isfinite(cu.a1) || !std::isfinite(cd.a0) ||
            !std::isfinite(cd.a1))
            throw ValidationError("build_blocklength_subproblem: non-finite constants");

        double tau_cap = sca::kInf;
        struct Hop {
            LenVar l;
            BlocklengthCoeffs c;
            double l_lo, l_ws;
        } hops[2] = {{LU, cu, dv.l_u[n], lu_ws[n]}, {LD, cd, dv.l_d[n], ld_ws[n]}};
        for (const Hop& h : hops) {
            // a0 l - tau >= a1 sqrt(l_lo) + a1/(2 sqrt(l_lo)) (l - l_lo)
            sca::Tangent t = sca::tangent_of_concave(sca::ConcaveFn::sqrt_x, h.l_lo);
            AffineAtom a;
            a.rel = Rel::ge;
            a.expr.add(var(n, h.l), h.c.a0 - h.c.a1 * t.slope)
                .add(var(n, LTAU), -1.0)
                .add_const(-h.c.a1 * t.intercept);
            prog.add_atom(std::move(a));
            tau_cap = std::min(tau_cap, h.c.a0 * h.l_ws - h.c.a1 * t.at(h.l_ws));
        }
        prog.warm_start[var(n, LTAU).index] =
            tau_cap - 0.02 * (1.0 + std::abs(tau_cap));

        // C9 per-slot latency budget.
        AffineAtom c9;
        c9.rel = Rel::le;
        c9.expr.add(var(n, LU), 1.0).add(var(n, LD), 1.0).add_const(-s.l_max);
        prog.add_atom(std::move(c9));
    }

    // C5 / C6 with powers fixed.
    {
        AffineAtom c5;
        c5.rel = Rel::le;
        for (int n = 0; n < N; ++n) c5.expr.add(var(n, LU), dv.p_a[n]);
        c5.expr.add_const(-s.p_tot_alice);
        prog.add_atom(std::move(c5));
        AffineAtom c6;
        c6.rel = Rel::le;
        for (int n = 0; n < N; ++n) c6.expr.add(var(n, LD), dv.p_r[n]);
        c6.expr.add_const(-s.p_tot_uav);
        prog.add_atom(std::move(c6));
    }
    return prog;
}

// ---------------------------------------------------------------------------
// Trajectory subproblem: 3D waypoints with per-slot slack chains
// ---------------------------------------------------------------------------

namespace {
enum TrajVar {
    QX = 0, QY, QZ, TTAU,
    LAM1, LAM2, BET1,
    OM1, OM2, PSI1,
    U1, V1, V2,
    kTrajVars
};
} // namespace

ConvexProgram build_trajectory_subproblem(const Scenario& s,
                                          const DecisionVariables& dv) {
    const int N = s.n_slots;
    radio::LinkBudget lb = radio::link_budget(s);
    ConvexProgram prog;

    for (int n = 0; n < N; ++n) {
        if (distance(dv.q_r[n], s.eve_est_pos) <= s.eve_uncertainty)
            throw ValidationError(
                "build_trajectory_subproblem: waypoint " + std::to_string(n) +
                " lies inside the Eve uncertainty ball");
    }
    // Interior-nudged expansion trajectory (free waypoints only).
    std::vector<Vec3> q0(dv.q_r);
    double dz = 1e-6 * std::max(1.0, s.h_max - s.h_min);
    for (int n = 1; n + 1 < N; ++n) {
        q0[n].z = std::min(std::max(q0[n].z, s.h_min + dz), s.h_max - dz);
        if (distance(q0[n], s.eve_est_pos) <= s.eve_uncertainty)
            throw ValidationError(
                "build_trajectory_subproblem: waypoint " + std::to_string(n) +
                " lies inside the Eve uncertainty ball");
    }

    for (int n = 0; n < N; ++n) {
        bool pinned = (n == 0 || n == N - 1);
        double lx = pinned ? q0[n].x : -sca::kInf;
        double ux = pinned ? q0[n].x : sca::kInf;
        double ly = pinned ? q0[n].y : -sca::kInf;
        double uy = pinned ? q0[n].y : sca::kInf;
        double lz = pinned ? q0[n].z : s.h_min;
        double uz = pinned ? q0[n].z : s.h_max;
        prog.add_var(slot_tag("x", n), lx, ux, q0[n].x);
        prog.add_var(slot_tag("y", n), ly, uy, q0[n].y);
        prog.add_var(slot_tag("z", n), lz, uz, q0[n].z);
        prog.add_var(slot_tag("tau", n), -sca::kInf, sca::kInf, 0.0);
        for (const char* t : {"lambda1", "lambda2", "beta1", "omega1", "omega2",
                              "psi1", "u1", "v1", "v2"})
            prog.add_var(slot_tag(t, n), kSlackFloor, sca::kInf, 1.0);
    }
    auto var = [&](int n, TrajVar v) { return VarRef{n * kTrajVars + v}; };
    auto pin = [&](int n, TrajVar v, double value) {
        int i = var(n, v).index;
        prog.lower[i] = prog.upper[i] = prog.warm_start[i] = value;
    };

    const double d0 = s.eve_est_pos.dot(s.eve_est_pos) +
                      s.eve_uncertainty * s.eve_uncertainty;
    const double eps1 = 1e-4, eps2 = 2e-4, eps3 = 1e-3;

    for (int n = 0; n < N; ++n) {
        prog.set_objective(var(n, TTAU), 1.0);
        radio::SlotSnr snr = radio::slot_snrs(s, q0[n], dv.p_a[n], dv.p_r[n]);
        bool up_ok = dv.p_a[n] >= kDegeneratePower * s.p_max_alice;
        bool dn_ok = dv.p_r[n] >= kDegeneratePower * s.p_max_uav;
        double tau_cap = sca::kInf;

        if (!up_ok || !dn_ok) {
            // A silent hop admits no secure bits regardless of the trajectory.
            AffineAtom a;
            a.rel = Rel::le;
            a.expr.add(var(n, TTAU), 1.0);
            prog.add_atom(std::move(a));
            tau_cap = 0.0;
        }

        if (up_ok) {
            double b0 = radio::q_inv(s.eps_r) * kLog2E / std::sqrt(dv.l_u[n]);
            // b1 collects the constant Eve-side terms; the rate subtracts the
            // Eve dispersion penalty, so it enters the cap with a plus
            // (anything else breaks tangency at the expansion point).
            double b1 = std::log1p(snr.gamma_ae_bar) * kLog2E +
                        kLog2E * radio::dispersion_root(snr.gamma_ae_bar) *
                            radio::q_inv(s.eta_e) / std::sqrt(dv.l_u[n]);
            double b2 = 1.0 / (dv.l_u[n] * (1.0 - s.eps_r));

            double lam1_o = std::max(snr.gamma_r, kSlackFloor);
            double lam2_o = 1.0 / lam1_o;
            double bet1_o = std::max(radio::dispersion_root(lam1_o), kSlackFloor);

            // uplink rate cap: ln(1+lam1) - ln2 (b0 beta1 + b2 tau + b1) >= 0
            {
                LogAffineAtom a;
                a.logs.push_back({1.0, AffineExpr(1.0).add(var(n, LAM1), 1.0)});
                a.tail.add(var(n, BET1), -kLn2 * b0)
                    .add(var(n, TTAU), -kLn2 * b2)
                    .add_const(-kLn2 * b1);
                prog.add_atom(std::move(a));
            }
            // lam2 overestimates the inverse uplink SNR
            {
                QuadOverAffineAtom a;
                a.rows.push_back(AffineExpr(-s.alice_pos.x).add(var(n, QX), 1.0));
                a.rows.push_back(AffineExpr(-s.alice_pos.y).add(var(n, QY), 1.0));
                a.rows.push_back(AffineExpr(-s.alice_pos.z).add(var(n, QZ), 1.0));
                a.f1.add(var(n, LAM2), dv.p_a[n] * lb.rho_r);
                a.f2.add_const(1.0);
                prog.add_atom(std::move(a));
            }
            // product cap lam1 lam2 <= 1 through the linear lower
            // bound on 1/(lam1 lam2) at the expansion point
            {
                double den = 1.0 / (lam1_o * lam2_o * lam1_o * lam2_o);
                AffineAtom a;
                a.rel = Rel::ge;
                a.expr.add(var(n, LAM1), -lam2_o * den)
                    .add(var(n, LAM2), -lam1_o * den)
                    .add_const(3.0 * lam1_o * lam2_o * den - 1.0);
                prog.add_atom(std::move(a));
            }
            // beta tangent: ln beta1 + ln(1+lam1) >= A0(lam1_o;1) + A1 (lam1-lam1_o)
            {
                sca::Tangent t = sca::tangent_of_concave(
                    sca::ConcaveFn::half_log_kx_2kx, lam1_o, 1.0);
                LogAffineAtom a;
                a.logs.push_back({1.0, AffineExpr().add(var(n, BET1), 1.0)});
                a.logs.push_back({1.0, AffineExpr(1.0).add(var(n, LAM1), 1.0)});
                a.tail.add(var(n, LAM1), -t.slope).add_const(-t.intercept);
                prog.add_atom(std::move(a));
            }

            double lam1_ws = lam1_o * (1.0 - 2.0 * eps1);
            double lam2_ws = lam2_o * (1.0 + eps1);
            double bet1_ws = bet1_o * (1.0 + eps3);
            prog.warm_start[var(n, LAM1).index] = lam1_ws;
            prog.warm_start[var(n, LAM2).index] = lam2_ws;
            prog.warm_start[var(n, BET1).index] = bet1_ws;
            double cap = (std::log1p(lam1_ws) * kLog2E - b0 * bet1_ws - b1) / b2;
            tau_cap = std::min(tau_cap, cap);
        } else {
            pin(n, LAM1, 1.0);
            pin(n, LAM2, 1.0);
            pin(n, BET1, 1.0);
        }

        if (dn_ok) {
            double c0 = radio::q_inv(s.eps_b) * kLog2E / std::sqrt(dv.l_d[n]);
            double c1 = radio::q_inv(s.eta_e) * kLog2E / std::sqrt(dv.l_d[n]);
            double c2 = 1.0 / (dv.l_d[n] * (1.0 - s.eps_b));

            double om1_o = std::max(snr.gamma_b, kSlackFloor);
            double om2_o = 1.0 / om1_o;
            double psi1_o = std::max(radio::dispersion_root(om1_o), kSlackFloor);
            double gre_o = std::max(snr.gamma_re_tilde, kSlackFloor);
            double u1_o = 1.0 / gre_o;
            double v2_o = gre_o;
            double v1_o = std::max(radio::dispersion_root(v2_o), kSlackFloor);

            // om2 overestimates the inverse downlink SNR
            {
                QuadOverAffineAtom a;
                a.rows.push_back(AffineExpr(-s.bob_pos.x).add(var(n, QX), 1.0));
                a.rows.push_back(AffineExpr(-s.bob_pos.y).add(var(n, QY), 1.0));
                a.rows.push_back(AffineExpr(-s.bob_pos.z).add(var(n, QZ), 1.0));
                a.f1.add(var(n, OM2), dv.p_r[n] * lb.rho_b);
                a.f2.add_const(1.0);
                prog.add_atom(std::move(a));
            }
            // product cap om1 om2 <= 1, same linearization
            {
                double den = 1.0 / (om1_o * om2_o * om1_o * om2_o);
                AffineAtom a;
                a.rel = Rel::ge;
                a.expr.add(var(n, OM1), -om2_o * den)
                    .add(var(n, OM2), -om1_o * den)
                    .add_const(3.0 * om1_o * om2_o * den - 1.0);
                prog.add_atom(std::move(a));
            }
            // psi tangent
            {
                sca::Tangent t = sca::tangent_of_concave(
                    sca::ConcaveFn::half_log_kx_2kx, om1_o, 1.0);
                LogAffineAtom a;
                a.logs.push_back({1.0, AffineExpr().add(var(n, PSI1), 1.0)});
                a.logs.push_back({1.0, AffineExpr(1.0).add(var(n, OM1), 1.0)});
                a.tail.add(var(n, OM1), -t.slope).add_const(-t.intercept);
                prog.add_atom(std::move(a));
            }
            // aggregate: ln(1+om1) + ln(u1/(1+u1)) - ln2 (c0 psi1 + c1 v1 + c2 tau) >= 0
            {
                LogRatioAtom a;
                a.u = var(n, U1);
                a.logs.push_back({1.0, AffineExpr(1.0).add(var(n, OM1), 1.0)});
                a.tail.add(var(n, PSI1), -kLn2 * c0)
                    .add(var(n, V1), -kLn2 * c1)
                    .add(var(n, TTAU), -kLn2 * c2);
                prog.add_atom(std::move(a));
            }
            // u1 is capped by the squared worst-case UAV-Eve distance,
            // with the convex distance square linearized at q0; rho_e because
            // u1 bounds the inverse of the UAV->Eve SNR.
            {
                AffineExpr rhs(d0 - q0[n].dot(q0[n]));
                Vec3 g = q0[n] - s.eve_est_pos;
                rhs.add(var(n, QX), 2.0 * g.x)
                    .add(var(n, QY), 2.0 * g.y)
                    .add(var(n, QZ), 2.0 * g.z)
                    .add(var(n, U1), -dv.p_r[n] * lb.rho_e);
                if (s.eve_uncertainty > 0.0) {
                    NormAffineAtom a;
                    a.rows.push_back(
                        AffineExpr(-s.eve_est_pos.x).add(var(n, QX), 1.0));
                    a.rows.push_back(
                        AffineExpr(-s.eve_est_pos.y).add(var(n, QY), 1.0));
                    a.rows.push_back(
                        AffineExpr(-s.eve_est_pos.z).add(var(n, QZ), 1.0));
                    for (auto& [idx, coef] : rhs.terms)
                        coef /= 2.0 * s.eve_uncertainty;
                    rhs.constant /= 2.0 * s.eve_uncertainty;
                    a.rhs = std::move(rhs);
                    prog.add_atom(std::move(a));
                } else {
                    AffineAtom a;
                    a.rel = Rel::ge;
                    a.expr = std::move(rhs);
                    prog.add_atom(std::move(a));
                }
            }
            // v tangent: ln v1 + ln(1+v2) >= A0(v2_o;1) + A1 (v2 - v2_o)
            {
                sca::Tangent t = sca::tangent_of_concave(
                    sca::ConcaveFn::half_log_kx_2kx, v2_o, 1.0);
                LogAffineAtom a;
                a.logs.push_back({1.0, AffineExpr().add(var(n, V1), 1.0)});
                a.logs.push_back({1.0, AffineExpr(1.0).add(var(n, V2), 1.0)});
                a.tail.add(var(n, V2), -t.slope).add_const(-t.intercept);
                prog.add_atom(std::move(a));
            }
            // 1 <= u1 v2
            {
                QuadOverAffineAtom a;
                a.rows.push_back(AffineExpr(1.0));
                a.f1.add(var(n, U1), 1.0);
                a.f2.add(var(n, V2), 1.0);
                prog.add_atom(std::move(a));
            }

            double om1_ws = om1_o * (1.0 - 2.0 * eps1);
            double om2_ws = om2_o * (1.0 + eps1);
            double psi1_ws = psi1_o * (1.0 + eps3);
            double u1_ws = u1_o * (1.0 - eps2);
            double v2_ws = v2_o * (1.0 + 2.0 * eps2);
            double v1_ws = v1_o * (1.0 + eps3);
            prog.warm_start[var(n, OM1).index] = om1_ws;
            prog.warm_start[var(n, OM2).index] = om2_ws;
            prog.warm_start[var(n, PSI1).index] = psi1_ws;
            prog.warm_start[var(n, U1).index] = u1_ws;
            prog.warm_start[var(n, V1).index] = v1_ws;
            prog.warm_start[var(n, V2).index] = v2_ws;
            double cap = (std::log1p(om1_ws) * kLog2E +
                          (std::log(u1_ws) - std::log1p(u1_ws)) * kLog2E -
                          c0 * psi1_ws - c1 * v1_ws) /
                         c2;
            tau_cap = std::min(tau_cap, cap);
        } else {
            pin(n, OM1, 1.0);
            pin(n, OM2, 1.0);
            pin(n, PSI1, 1.0);
            pin(n, U1, 1.0);
            pin(n, V1, 1.0);
            pin(n, V2, 1.0);
        }

        if (!std::isfinite(tau_cap)) tau_cap = 0.0;
        prog.warm_start[var(n, TTAU).index] =
            tau_cap - 0.02 * (1.0 + std::abs(tau_cap));
    }

    // C2 / C3 mobility between consecutive waypoints.
    for (int n = 0; n + 1 < N; ++n) {
        NormAffineAtom c2;
        c2.rows.push_back(
            AffineExpr().add(var(n + 1, QX), 1.0).add(var(n, QX), -1.0));
        c2.rows.push_back(
            AffineExpr().add(var(n + 1, QY), 1.0).add(var(n, QY), -1.0));
        c2.rhs = AffineExpr(s.v_xy_max * s.slot_duration);
        prog.add_atom(std::move(c2));

        AffineAtom up, dn;
        up.rel = Rel::le;
        up.expr.add(var(n + 1, QZ), 1.0)
            .add(var(n, QZ), -1.0)
            .add_const(-s.v_z_max * s.slot_duration);
        prog.add_atom(std::move(up));
        dn.rel = Rel::le;
        dn.expr.add(var(n, QZ), 1.0)
            .add(var(n + 1, QZ), -1.0)
            .add_const(-s.v_z_max * s.slot_duration);
        prog.add_atom(std::move(dn));
    }
    return prog;
}

DecisionVariables round_blocklengths(const Scenario& s,
                                     const DecisionVariables& dv_relaxed) {
    DecisionVariables dv = dv_relaxed;
    for (int n = 0; n < s.n_slots; ++n) {
        dv.l_u[n] = std::max(1.0, std::floor(dv.l_u[n]));
        dv.l_d[n] = std::max(1.0, std::floor(dv.l_d[n]));
    }
    rederive_tau(s, dv);
    ConstraintResiduals res = check_constraints(s, dv);
    if (res.max_c1_to_c9() > 1e-8 || res.integrality > 0.0)
        throw std::logic_error(
            "round_blocklengths: rounding violated a constraint (bug)");
    return dv;
}

ConstraintResiduals check_constraints(const Scenario& s,
                                      const DecisionVariables& dv) {
    const int N = s.n_slots;
    ConstraintResiduals r;
    r.c1 = std::max(distance(dv.q_r[0], s.uav_start),
                    distance(dv.q_r[N - 1], s.uav_end));
    for (int n = 0; n + 1 < N; ++n) {
        r.c2 = std::max(r.c2, (dv.q_r[n + 1] - dv.q_r[n]).norm_xy() -
                                  s.v_xy_max * s.slot_duration);
        r.c3 = std::max(r.c3, std::abs(dv.q_r[n + 1].z - dv.q_r[n].z) -
                                  s.v_z_max * s.slot_duration);
    }
    double sum_a = 0.0, sum_r = 0.0;
    for (int n = 0; n < N; ++n) {
        r.c4 = std::max({r.c4, s.h_min - dv.q_r[n].z, dv.q_r[n].z - s.h_max});
        sum_a += dv.p_a[n] * dv.l_u[n];
        sum_r += dv.p_r[n] * dv.l_d[n];
        r.c7 = std::max({r.c7, -dv.p_a[n], dv.p_a[n] - s.p_max_alice});
        r.c8 = std::max({r.c8, -dv.p_r[n], dv.p_r[n] - s.p_max_uav});
        r.c9 = std::max(r.c9, dv.l_u[n] + dv.l_d[n] - s.l_max);
        r.integrality = std::max(
            {r.integrality, std::abs(dv.l_u[n] - std::round(dv.l_u[n])),
             std::abs(dv.l_d[n] - std::round(dv.l_d[n])), 1.0 - dv.l_u[n],
             1.0 - dv.l_d[n]});
    }
    r.c5 = sum_a - s.p_tot_alice;
    r.c6 = sum_r - s.p_tot_uav;
    return r;
}

// ---------------------------------------------------------------------------
// Algorithm 1 (BSCA) and the benchmark schemes
// ---------------------------------------------------------------------------

namespace {

std::vector<SlotProfile> make_profiles(const Scenario& s,
                                       const DecisionVariables& dv) {
    std::vector<SlotProfile> out(s.n_slots);
    for (int n = 0; n < s.n_slots; ++n) {
        SlotProfile& p = out[n];
        p.q = dv.q_r[n];
        if (n + 1 < s.n_slots) {
            p.v_xy = (dv.q_r[n + 1] - dv.q_r[n]).norm_xy() / s.slot_duration;
            p.v_z = (dv.q_r[n + 1].z - dv.q_r[n].z) / s.slot_duration;
        }
        p.p_a = dv.p_a[n];
        p.p_r = dv.p_r[n];
        p.l_u = dv.l_u[n];
        p.l_d = dv.l_d[n];
        radio::SlotSnr snr = radio::slot_snrs(s, dv.q_r[n], dv.p_a[n], dv.p_r[n]);
        p.gamma_r = snr.gamma_r;
        p.gamma_b = snr.gamma_b;
        p.gamma_ae = snr.gamma_ae_bar;
        p.gamma_re = snr.gamma_re_tilde;
        secrecy::SlotRates rates =
            secrecy::slot_rates(s, dv.q_r[n], dv.p_a[n], dv.p_r[n], dv.l_u[n],
                                dv.l_d[n]);
        p.r_u_fbl = rates.r_u_lb;
        p.r_d_fbl = rates.r_d_lb;
        p.r_u_inf = rates.c_u_inf;
        p.r_d_inf = rates.c_d_inf;
        p.b_s = rates.b_s;
    }
    return out;
}

struct BlockOutcome {
    BlockStep step;
    bool applied = false;
};

// Solve one block subproblem and apply it through the safeguarded acceptance:
// a step is kept only if the true EAST does not decrease beyond feas_tol.
template <typename Extract>
BlockOutcome run_block(const Scenario& s, DecisionVariables& dv,
                       const char* name, const ConvexProgram& prog,
                       const PlannerOptions& opts, int iteration,
                       Extract&& extract) {
    BlockOutcome out;
    out.step.block = name;

    solver::SolveReport rep = solver::solve(prog, opts.solver);
    out.step.status = rep.status;
    if (rep.status == solver::Status::numerical_failure)
        throw SolverFailure(std::string("subproblem '") + name +
                                "' failed numerically at iteration " +
                                std::to_string(iteration),
                            iteration, name);
    if (rep.status == solver::Status::infeasible_start) {
        out.step.accepted = false;
        return out;
    }

    double ws_obj = 0.0;
    for (size_t i = 0; i < prog.warm_start.size(); ++i)
        ws_obj += prog.objective[i] * prog.warm_start[i];
    out.step.surrogate_delta = rep.objective - ws_obj;

    DecisionVariables cand = dv;
    extract(rep.point, cand);
    rederive_tau(s, cand);

    double before = secrecy::east(s, dv);
    double after = secrecy::east(s, cand);
    if (after >= before - opts.solver.feas_tol) {
        dv = std::move(cand);
        out.step.accepted = true;
        out.applied = true;
    } else {
        out.step.accepted = false;
    }
    return out;
}

RunResult run_scheme(const Scenario& s, const PlannerOptions& opts,
                     bool optimize_resources, bool optimize_trajectory) {
    auto violations = validate(s);
    if (!violations.empty())
        throw ValidationError("planner: invalid scenario: " + violations[0]);

    RunResult result;
    DecisionVariables dv = initial_feasible(s);
    double prev = secrecy::east(s, dv);
    result.trace.east_initial = prev;
    if (opts.record_iterates) result.accepted_iterates.push_back(dv);

    const double eps = opts.epsilon < 0.0 ? s.epsilon_conv : opts.epsilon;
    const bool traj_free = s.n_slots > 2; // C1 pins everything otherwise

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        auto t0 = std::chrono::steady_clock::now();
        Iteration it;
        if (optimize_resources) {
            auto po = run_block(
                s, dv, "power", build_power_subproblem(s, dv), opts, iter,
                [&](std::span<const double> x, DecisionVariables& c) {
                    for (int n = 0; n < s.n_slots; ++n) {
                        c.p_a[n] = x[n * kPowerVars + PA];
                        c.p_r[n] = x[n * kPowerVars + PR];
                    }
                });
            it.steps.push_back(po.step);

            auto lo = run_block(
                s, dv, "blocklength", build_blocklength_subproblem(s, dv), opts,
                iter, [&](std::span<const double> x, DecisionVariables& c) {
                    for (int n = 0; n < s.n_slots; ++n) {
                        c.l_u[n] = std::max(1.0, x[n * kLenVars + LU]);
                        c.l_d[n] = std::max(1.0, x[n * kLenVars + LD]);
                    }
                });
            it.steps.push_back(lo.step);
        }
        if (optimize_trajectory && traj_free) {
            auto to = run_block(
                s, dv, "trajectory", build_trajectory_subproblem(s, dv), opts,
                iter, [&](std::span<const double> x, DecisionVariables& c) {
                    for (int n = 0; n < s.n_slots; ++n) {
                        c.q_r[n] = {x[n * kTrajVars + QX], x[n * kTrajVars + QY],
                                    x[n * kTrajVars + QZ]};
                    }
                    c.q_r[0] = s.uav_start;
                    c.q_r[s.n_slots - 1] = s.uav_end;
                });
            it.steps.push_back(to.step);
        }

        double now = secrecy::east(s, dv);
        it.east = now;
        it.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        result.trace.iterations.push_back(std::move(it));
        if (opts.record_iterates) result.accepted_iterates.push_back(dv);

        if (!optimize_resources && !(optimize_trajectory && traj_free))
            break; // nothing to iterate on
        if (std::abs(now - prev) <= eps) break;
        prev = now;
    }

    result.final_dv = round_blocklengths(s, dv);
    result.east = secrecy::east(s, result.final_dv);
    result.profiles = make_profiles(s, result.final_dv);
    return result;
}

} // namespace

RunResult run_bsca(const Scenario& s, const PlannerOptions& opts) {
    return run_scheme(s, opts, true, true);
}

RunResult run_rdft(const Scenario& s, const PlannerOptions& opts) {
    return run_scheme(s, opts, true, false);
}

RunResult run_tdfr(const Scenario& s, const PlannerOptions& opts) {
    return run_scheme(s, opts, false, true);
}

RunResult run_initial(const Scenario& s, const PlannerOptions& opts) {
    PlannerOptions o = opts;
    o.max_iterations = 0;
    return run_scheme(s, o, false, false);
}

} // namespace east::planner
