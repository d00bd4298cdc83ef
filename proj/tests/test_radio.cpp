#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "east/radio.hpp"
#include "east/rng.hpp"
#include "east/scenario.hpp"

using namespace east;
using doctest::Approx;

TEST_CASE("los gain is inverse-square") {
    CHECK(radio::los_gain(1.0, 1e-7) == Approx(1e-7));
    CHECK(radio::los_gain(1000.0, 1e-7) == Approx(1e-13));
    CHECK(radio::los_gain(2.0, 1e-7) == Approx(2.5e-8));
    CHECK_THROWS_AS(radio::los_gain(0.0, 1e-7), std::domain_error);
    CHECK_THROWS_AS(radio::los_gain(-3.0, 1e-7), std::domain_error);
}

TEST_CASE("terrestrial mean gain is beta0 / d^alpha") {
    CHECK(radio::terrestrial_mean_gain(1.0, 1e-7, 3.0) == Approx(1e-7));
    // d = |q_a - q_e| for the default geometry
    CHECK(radio::terrestrial_mean_gain(921.954, 1e-7, 3.0) ==
          Approx(1.2760633673611735e-16).epsilon(1e-12));
    CHECK(radio::terrestrial_mean_gain(10.0, 1e-7, 4.0) == Approx(1e-11));
    CHECK_THROWS_AS(radio::terrestrial_mean_gain(-1.0, 1e-7, 3.0),
                    std::domain_error);
    CHECK_THROWS_AS(radio::terrestrial_mean_gain(1.0, 1e-7, 2.0),
                    std::domain_error);
    CHECK_THROWS_AS(radio::terrestrial_mean_gain(1.0, 1e-7, 4.5),
                    std::domain_error);
}

TEST_CASE("channel dispersion") {
    constexpr double kLog2E2 = 2.0813689810056078; // (log2 e)^2
    CHECK(radio::dispersion(0.0) == 0.0);
    CHECK(radio::dispersion(1.0) == Approx(1.5610267357542058).epsilon(1e-14));
    CHECK(radio::dispersion(1e9) == Approx(kLog2E2).epsilon(1e-12));
    CHECK(radio::dispersion(1e6) < kLog2E2); // supremum never attained
    CHECK_THROWS_AS(radio::dispersion(-0.1), std::domain_error);

    double prev = -1.0;
    for (double g = 0.0; g < 50.0; g += 0.37) {
        double v = radio::dispersion(g);
        CHECK(v >= prev);
        CHECK(v < kLog2E2);
        prev = v;
    }
}

TEST_CASE("q_inv inverts the complementary Gaussian CDF") {
    CHECK(radio::q_inv(0.5) == Approx(0.0).epsilon(1e-12));
    CHECK(radio::q_inv(1e-3) == Approx(3.0902323061678135).epsilon(1e-12));
    CHECK(radio::q_inv(1e-2) == Approx(2.3263478740408411).epsilon(1e-12));
    CHECK_THROWS_AS(radio::q_inv(0.0), std::domain_error);
    CHECK_THROWS_AS(radio::q_inv(1.0), std::domain_error);

    // |Q(q_inv(p)) - p| <= 1e-10 on a grid spanning {1e-6 .. 0.5}; strictly
    // decreasing in p.
    double prev = std::numeric_limits<double>::infinity();
    for (double p = 1e-6; p <= 0.5; p *= 1.3) {
        double x = radio::q_inv(p);
        CHECK(std::abs(radio::q_func(x) - p) <= 1e-10);
        CHECK(x < prev);
        prev = x;
    }
    CHECK(std::abs(radio::q_func(radio::q_inv(0.5)) - 0.5) <= 1e-10);
}

TEST_CASE("slot snrs") {
    Scenario s = default_scenario();

    SUBCASE("zero power means zero SNR") {
        radio::SlotSnr r = radio::slot_snrs(s, {0, 0, 100}, 0.0, 0.0);
        CHECK(r.gamma_r == 0.0);
        CHECK(r.gamma_b == 0.0);
        CHECK(r.gamma_ae_bar == 0.0);
        CHECK(r.gamma_re_tilde == 0.0);
    }
    SUBCASE("100 m above Alice") {
        Vec3 q = s.alice_pos + Vec3{0, 0, 100};
        radio::SlotSnr r = radio::slot_snrs(s, q, 0.1, 0.0);
        CHECK(r.gamma_r == Approx(1e5).epsilon(1e-12)); // rho_r = 1e10
        CHECK(r.gamma_ae_bar == Approx(1.3185013095737829).epsilon(1e-12));
    }
    SUBCASE("SNRs scale linearly in power") {
        Vec3 q{12.5, -44.0, 80.0};
        radio::SlotSnr a = radio::slot_snrs(s, q, 0.013, 0.041);
        radio::SlotSnr b = radio::slot_snrs(s, q, 0.026, 0.082);
        CHECK(b.gamma_r == Approx(2 * a.gamma_r).epsilon(1e-14));
        CHECK(b.gamma_b == Approx(2 * a.gamma_b).epsilon(1e-14));
        CHECK(b.gamma_ae_bar == Approx(2 * a.gamma_ae_bar).epsilon(1e-14));
        CHECK(b.gamma_re_tilde == Approx(2 * a.gamma_re_tilde).epsilon(1e-14));
    }
    SUBCASE("degenerate geometry is an error, never clamped") {
        Vec3 inside = s.eve_est_pos + Vec3{0, 0, 5.0}; // inside the 10 m ball
        CHECK_THROWS_AS(radio::slot_snrs(s, inside, 0.1, 0.1),
                        std::domain_error);
        CHECK_THROWS_AS(radio::slot_snrs(s, {0, 0, 0}, 0.1, 0.1),
                        std::domain_error);
    }
}

TEST_CASE("reverse-triangle worst case dominates sampled Eve positions") {
    Scenario s = default_scenario();
    Vec3 waypoint{120.0, -250.0, 75.0};
    int violations = 0;
    for (int k = 0; k < 10000; ++k) {
        double gx = radio::q_inv(rng::uniform01(7, 0, 3 * k));
        double gy = radio::q_inv(rng::uniform01(7, 0, 3 * k + 1));
        double gz = radio::q_inv(rng::uniform01(7, 0, 3 * k + 2));
        double gn = std::sqrt(gx * gx + gy * gy + gz * gz);
        double radius = s.eve_uncertainty * std::cbrt(rng::uniform01(7, 1, k));
        Vec3 q_e = s.eve_est_pos + (gn > 0 ? radius / gn : 0.0) * Vec3{gx, gy, gz};
        for (Vec3 q : {s.alice_pos, waypoint}) {
            double wc = distance(q, s.eve_est_pos) - s.eve_uncertainty;
            if (distance(q, q_e) < wc - 1e-9) ++violations;
        }
    }
    CHECK(violations == 0);
}
