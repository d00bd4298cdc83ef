#pragma once

#include <cstdint>

#include "east/planner.hpp"
#include "east/scenario.hpp"

namespace east::oracle {

/// Exhaustive-search resolution for the single-slot problem.
struct GridSpec {
    int n_p_a = 200;       // grid points on [0, p_max_alice]
    int n_p_r = 200;       // grid points on [0, p_max_uav]
    int l_u_step = 1;      // stride through {1, ..., l_max - 1}
    std::int64_t max_points = 100000000; // guard against accidental blow-up
};

struct GridOptimum {
    double east = 0.0;
    double p_a = 0.0, p_r = 0.0;
    int l_u = 1, l_d = 1;
};

/// Brute-force optimum of the single-slot problem with a fixed UAV position:
/// evaluates slot_throughput over the (p_a, p_r, l_u) grid with
/// l_d = l_max - l_u, honoring C5-C9. Deterministic argmax with
/// lexicographic tie-break (p_a, then p_r, then l_u).
GridOptimum grid_optimum_single_slot(const Scenario& s, Vec3 q_uav,
                                     const GridSpec& grid = {});

struct BoundAudit {
    double worst_margin = 0.0; // min over samples of (true rate - bound)
    int worst_slot = -1;
};

/// Samples Eve positions uniformly in the uncertainty ball and verifies the
/// worst-case rate bounds: returns the smallest observed margin, which must
/// not be meaningfully negative.
BoundAudit sampled_bound_audit(const Scenario& s,
                               const planner::DecisionVariables& dv,
                               int n_eve_samples, std::uint64_t seed);

} // namespace east::oracle
