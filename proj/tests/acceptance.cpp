// Acceptance suite: exercises the full planning pipeline on the shipped
// configuration and prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "east/oracle.hpp"
#include "east/planner.hpp"
#include "east/radio.hpp"
#include "east/rng.hpp"
#include "east/sca_atoms.hpp"
#include "east/scenario.hpp"
#include "east/secrecy.hpp"

using namespace east;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
    std::printf("[%s] criterion %d (%s): %s\n", pass ? "PASS" : "FAIL",
                criterion, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// Randomized but always-valid compact scenarios for the monotonicity check.
Scenario random_scenario(std::uint64_t seed) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        std::uint64_t k = seed * 1000 + attempt;
        auto u = [&](int stream) { return rng::uniform01(k, stream, 17); };
        Scenario s = default_scenario();
        s.slot_duration = 1.0;
        s.n_slots = 12 + static_cast<int>(u(0) * 8.0); // 12..19
        s.mission_time = s.n_slots * s.slot_duration;
        s.alice_pos = {-350.0 - 200.0 * u(1), -150.0 + 300.0 * u(2), 0.0};
        s.bob_pos = {350.0 + 200.0 * u(3), -150.0 + 300.0 * u(4), 0.0};
        s.eve_est_pos = {-300.0 + 600.0 * u(5), 350.0 + 300.0 * u(6), 0.0};
        s.eve_uncertainty = 5.0 + 40.0 * u(7);
        double z0 = 61.0 + 50.0 * u(8);
        double z1 = 61.0 + 50.0 * u(9);
        s.uav_start = {-120.0 - 60.0 * u(10), -120.0 - 60.0 * u(11), z0};
        s.uav_end = {120.0 + 60.0 * u(12), 120.0 + 60.0 * u(13), z1};
        s.p_tot_alice = (0.4 + 1.2 * u(14)) * s.n_slots / 100.0;
        s.p_tot_uav = (0.4 + 1.2 * u(15)) * s.n_slots / 100.0;
        s.l_max = 100 + 50 * static_cast<int>(u(16) * 6.0);
        s.rng_seed = k;
        if (validate(s).empty()) return s;
    }
}

} // namespace

int main() {
    std::printf("acceptance: default-scenario planning pipeline\n");
    const Scenario def = default_scenario();

    // Shared runs for criteria 1, 2, 3, 5 and 9.
    planner::PlannerOptions rec;
    rec.record_iterates = true;
    auto t0 = std::chrono::steady_clock::now();
    planner::RunResult jtrd = planner::run_bsca(def, rec);
    double t_jtrd = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    planner::RunResult rdft = planner::run_rdft(def, rec);
    planner::RunResult tdfr = planner::run_tdfr(def, rec);
    planner::RunResult init = planner::run_initial(def);
    double t_bench = seconds_since(t0);

    // 1. Headline EAST on the default configuration.
    report(1, "headline EAST", jtrd.east >= 58.0 && jtrd.east <= 88.0,
           fmt("jtrd EAST = %.3f bits/s in [58, 88], %zu iterations, %.1f s "
               "(benchmarks %.1f s)",
               jtrd.east, jtrd.trace.iterations.size(), t_jtrd, t_bench));

    // 2. Scheme ordering and the JTRD/RDFT gap.
    {
        double ratio = jtrd.east / rdft.east;
        bool order = jtrd.east >= rdft.east - 1e-9 &&
                     rdft.east >= tdfr.east - 1e-9 &&
                     tdfr.east >= init.east - 1e-9;
        bool strict = jtrd.east >= 1.01 * rdft.east;
        bool band = ratio >= 1.05 && ratio <= 1.35;
        report(2, "scheme ordering", order && strict && band,
               fmt("jtrd %.3f >= rdft %.3f >= tdfr %.3f >= initial %.3f, "
                   "jtrd/rdft = %.4f",
                   jtrd.east, rdft.east, tdfr.east, init.east, ratio));
    }

    // 3. BSCA monotonicity on the default and on 10 randomized scenarios.
    {
        bool ok = true;
        std::string worst = "all traces nondecreasing";
        auto check_trace = [&](const planner::RunResult& r, const std::string& tag) {
            double prev = r.trace.east_initial;
            for (size_t i = 0; i < r.trace.iterations.size(); ++i) {
                double delta = r.trace.iterations[i].east - prev;
                if (delta < -1e-6) {
                    ok = false;
                    worst = fmt("%s iteration %zu delta %.3e", tag.c_str(), i + 1,
                                delta);
                }
                prev = r.trace.iterations[i].east;
            }
        };
        check_trace(jtrd, "default");
        for (int k = 0; k < 10; ++k) {
            Scenario s = random_scenario(k + 1);
            planner::RunResult r = planner::run_bsca(s);
            check_trace(r, fmt("random[%d]", k));
        }
        report(3, "BSCA monotonicity", ok, worst);
    }

    // 4. Single-slot brute-force oracle. The budgets are set above p_max*l_max
    // so they never bind: with a binding budget the initial point saturates
    // p*l and block-coordinate ascent cannot trade power against blocklength
    // at N = 1, which would make the comparison test the start point rather
    // than the machinery.
    {
        Scenario s = def;
        s.n_slots = 1;
        s.mission_time = s.slot_duration;
        s.uav_start = s.uav_end = Vec3{0, 0, 60};
        s.p_tot_alice = s.p_max_alice * s.l_max;
        s.p_tot_uav = s.p_max_uav * s.l_max;
        auto tg = std::chrono::steady_clock::now();
        planner::RunResult r = planner::run_bsca(s);
        oracle::GridSpec grid; // 200 x 200 x (l_max - 1)
        oracle::GridOptimum g = oracle::grid_optimum_single_slot(s, s.uav_start, grid);
        double wall = seconds_since(tg);
        bool pass = g.east >= r.east * 0.98 && wall < 120.0;
        report(4, "single-slot oracle", pass,
               fmt("bsca %.3f vs grid %.3f (bsca/grid = %.4f, grid argmax "
                   "p_a=%.4g p_r=%.4g l_u=%d), %.1f s",
                   r.east, g.east, r.east / g.east, g.p_a, g.p_r, g.l_u, wall));
    }

    // 5. Bound validity: Monte-Carlo dominance and the sampled Eve audit on
    // the converged default solution.
    {
        int mc_failures = 0;
        double worst_gap = 1e300;
        for (int i = 0; i < 1000; ++i) {
            Vec3 q{-600.0 + 1400.0 * rng::uniform01(5, 50, i),
                   -900.0 + 1800.0 * rng::uniform01(5, 51, i),
                   60.0 + 60.0 * rng::uniform01(5, 52, i)};
            if (distance(q, def.eve_est_pos) <= def.eve_uncertainty + 1.0)
                continue;
            double p_a = 1e-5 + (def.p_max_alice - 1e-5) * rng::uniform01(5, 53, i);
            double l_u = 10.0 + 380.0 * rng::uniform01(5, 54, i);
            auto est = secrecy::mc_uplink_rate(def, q, p_a, l_u, 100000, 900 + i);
            radio::SlotSnr snr = radio::slot_snrs(def, q, p_a, 0.0);
            double lb = secrecy::uplink_rate_lb(snr, l_u, def.eps_r, def.eta_e);
            double gap = est.mean + 3.0 * est.stderr_ - lb;
            worst_gap = std::min(worst_gap, gap);
            if (gap < -1e-12) ++mc_failures;
        }
        oracle::BoundAudit audit =
            oracle::sampled_bound_audit(def, jtrd.final_dv, 10000, def.rng_seed);
        bool pass = mc_failures == 0 && audit.worst_margin >= -1e-9;
        report(5, "bound validity", pass,
               fmt("mc failures %d/1000 (worst mc+3se-lb = %.3e), audit margin "
                   "%.3e on the converged default",
                   mc_failures, worst_gap, audit.worst_margin));
    }

    // 6. Tangency / convexity property suite.
    {
        int bad_tangent = 0;
        for (int i = 0; i < 1000; ++i) {
            double x0 = std::pow(10.0, -3.0 + 6.0 * rng::uniform01(6, 60, i));
            double x = std::pow(10.0, -3.0 + 6.0 * rng::uniform01(6, 61, i));
            for (double kk : {0.05, 1.0, 40.0}) {
                auto t = sca::tangent_of_concave(sca::ConcaveFn::half_log_kx_2kx,
                                                 x0, kk);
                if (t.at(x) < sca::a0(x, kk) - 1e-12) ++bad_tangent;
                if (std::abs(t.at(x0) - sca::a0(x0, kk)) > 1e-12) ++bad_tangent;
            }
            auto ts = sca::tangent_of_concave(sca::ConcaveFn::sqrt_x, x0);
            if (ts.at(x) < std::sqrt(x) - 1e-12) ++bad_tangent;
            auto tl = sca::tangent_of_concave(sca::ConcaveFn::log1p_kx, x0, 2.0);
            if (tl.at(x) < std::log1p(2.0 * x) - 1e-12) ++bad_tangent;
        }

        double worst_fd = 0.0;
        for (double kk : {0.01, 1.0, 100.0}) {
            for (double x = 1e-4; x <= 1e4; x *= 2.3) {
                double h = 1e-6 * x;
                double fd = (sca::a0(x + h, kk) - sca::a0(x - h, kk)) / (2 * h);
                worst_fd = std::max(
                    worst_fd, std::abs(sca::a1(x, kk) - fd) /
                                  std::max(1.0, std::abs(fd)));
            }
        }

        int bad_flb = 0;
        for (int i = 0; i < 10000; ++i) {
            double x = std::pow(10.0, -3.0 + 6.0 * rng::uniform01(6, 62, i));
            double y = std::pow(10.0, -3.0 + 6.0 * rng::uniform01(6, 63, i));
            double x0 = std::pow(10.0, -3.0 + 6.0 * rng::uniform01(6, 64, i));
            double y0 = std::pow(10.0, -3.0 + 6.0 * rng::uniform01(6, 65, i));
            if (sca::f_lb(x, y, x0, y0) > 1.0 / (x * y) + 1e-12) ++bad_flb;
        }

        int bad_concavity = 0;
        for (double u = 1e-3; u < 1e4; u *= 1.5) {
            double h = 1e-4 * u;
            auto f = [](double v) { return std::log(v / (1.0 + v)); };
            if ((f(u + h) - 2 * f(u) + f(u - h)) / (h * h) > 1e-9)
                ++bad_concavity;
        }
        bool pass = bad_tangent == 0 && worst_fd <= 1e-5 && bad_flb == 0 &&
                    bad_concavity == 0;
        report(6, "tangency/convexity suite", pass,
               fmt("tangent violations %d, max a1 vs fd %.2e, f_lb violations "
                   "%d/10000, log-ratio convexity violations %d",
                   bad_tangent, worst_fd, bad_flb, bad_concavity));
    }

    // 7. L^max sweep: nondecreasing, then the ceiling increment.
    {
        std::vector<int> lmaxes = {100, 200, 400, 800, 1000};
        std::vector<double> east(lmaxes.size());
        for (size_t i = 0; i < lmaxes.size(); ++i) {
            if (lmaxes[i] == 400) {
                east[i] = jtrd.east;
                continue;
            }
            Scenario s = def;
            s.l_max = lmaxes[i];
            east[i] = planner::run_bsca(s).east;
        }
        bool nondecreasing = true;
        for (size_t i = 0; i + 2 < lmaxes.size(); ++i)
            if (east[i + 1] < east[i] * 0.98) nondecreasing = false;
        double increment = east[4] - east[3];
        bool ceiling = increment < 0.05 * east[2];
        report(7, "l_max sweep trend", nondecreasing && ceiling,
               fmt("EAST {100: %.2f, 200: %.2f, 400: %.2f, 800: %.2f, 1000: "
                   "%.2f}; 800->1000 increment %.2f vs 5%% of EAST(400) = %.2f",
                   east[0], east[1], east[2], east[3], east[4], increment,
                   0.05 * east[2]));
    }

    // 8. Eve-uncertainty sweep: nonincreasing with a bounded total drop.
    {
        std::vector<double> des = {0.0, 100.0, 200.0, 300.0};
        std::vector<double> east(des.size());
        for (size_t i = 0; i < des.size(); ++i) {
            Scenario s = def;
            s.eve_uncertainty = des[i];
            east[i] = planner::run_bsca(s).east;
        }
        bool nonincreasing = true;
        for (size_t i = 0; i + 1 < des.size(); ++i)
            if (east[i + 1] > east[i] * (1.0 + 1e-6)) nonincreasing = false;
        double drop = east[0] - east[3];
        bool bounded = drop <= 0.25 * east[0];
        report(8, "eve uncertainty sweep", nonincreasing && bounded,
               fmt("EAST {0: %.2f, 100: %.2f, 200: %.2f, 300: %.2f}; total "
                   "drop %.2f <= 25%% of %.2f",
                   east[0], east[1], east[2], east[3], drop, east[0]));
    }

    // 9. Feasibility of every accepted iterate of the criterion-1/2 runs.
    {
        double worst = -1e300;
        auto audit_run = [&](const planner::RunResult& r) {
            for (const auto& dv : r.accepted_iterates) {
                planner::ConstraintResiduals res =
                    planner::check_constraints(def, dv);
                worst = std::max(worst, res.max_c1_to_c9());
            }
        };
        audit_run(jtrd);
        audit_run(rdft);
        audit_run(tdfr);
        double integrality =
            std::max(planner::check_constraints(def, jtrd.final_dv).integrality,
                     std::max(planner::check_constraints(def, rdft.final_dv).integrality,
                              planner::check_constraints(def, tdfr.final_dv).integrality));
        bool pass = worst <= 1e-8 && integrality == 0.0;
        report(9, "feasibility regression", pass,
               fmt("worst C1-C9 residual %.3e over %zu iterates, final "
                   "integrality gap %.1e",
                   worst,
                   jtrd.accepted_iterates.size() + rdft.accepted_iterates.size() +
                       tdfr.accepted_iterates.size(),
                   integrality));
    }

    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
