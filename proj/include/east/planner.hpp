#pragma once

#include <string>
#include <vector>

#include "east/program.hpp"
#include "east/scenario.hpp"
#include "east/solver.hpp"

namespace east::planner {

/// Per-timeslot decision set: powers (watts/use), blocklengths (continuous
/// while optimizing, integral after rounding), 3D waypoints and the slack
/// tau = secure bits admitted per slot (min over hops, unclipped).
struct DecisionVariables {
    std::vector<double> p_a, p_r;
    std::vector<double> l_u, l_d;
    std::vector<Vec3> q_r;
    std::vector<double> tau;
};

struct BlockStep {
    std::string block;           // "power", "blocklength", "trajectory"
    solver::Status status = solver::Status::optimal;
    double surrogate_delta = 0.0; // subproblem objective minus its warm start
    bool accepted = true;         // false when the safeguard rejected the step
};

struct Iteration {
    double east = 0.0;            // after this iteration's blocks
    std::vector<BlockStep> steps;
    double wall_time_s = 0.0;
};

struct IterationTrace {
    double east_initial = 0.0;
    std::vector<Iteration> iterations;
};

struct SlotProfile {
    Vec3 q;
    double v_xy = 0.0, v_z = 0.0;  // displacement to the next waypoint / dt
    double p_a = 0.0, p_r = 0.0;
    double l_u = 0.0, l_d = 0.0;
    double gamma_r = 0.0, gamma_b = 0.0, gamma_ae = 0.0, gamma_re = 0.0;
    double r_u_fbl = 0.0, r_d_fbl = 0.0; // finite-blocklength rates
    double r_u_inf = 0.0, r_d_inf = 0.0; // infinite-blocklength capacities
    double b_s = 0.0;
};

struct RunResult {
    DecisionVariables final_dv;         // blocklengths rounded
    double east = 0.0;                  // of final_dv
    IterationTrace trace;
    std::vector<SlotProfile> profiles;
    std::vector<DecisionVariables> accepted_iterates; // when recording enabled
};

struct PlannerOptions {
    int max_iterations = 50;
    double epsilon = -1.0;      // < 0 means use scenario.epsilon_conv
    solver::SolverOptions solver;
    bool record_iterates = false;

    PlannerOptions() {
        // Subproblem objectives are in bits (hundreds per slot): a 1e-5 gap
        // is far below the BSCA stopping threshold, and it keeps the barrier
        // from descending into float-noise territory.
        solver.kkt_tol = 1e-3;
        solver.max_newton_per_stage = 400;
    }
};

/// Straight-line constant-speed trajectory, L^max/2 blocklengths and
/// budget-respecting constant powers; satisfies C1-C10.
DecisionVariables initial_feasible(const Scenario& s);

/// Per-slot constants of the power subproblem (exposed for tests).
struct PowerCoeffs {
    double k1, k2, k3, k4, k5, k6, k7;
};
PowerCoeffs power_coeffs_uplink(const Scenario& s, Vec3 q, double l_u, double p_lo);
PowerCoeffs power_coeffs_downlink(const Scenario& s, Vec3 q, double l_d, double p_lo);

/// Per-slot constants of the blocklength subproblem (exposed for tests).
struct BlocklengthCoeffs {
    double a0, a1;
};
BlocklengthCoeffs blocklength_coeffs(double gamma_main, double gamma_eve,
                                     double eps, double eta);

sca::ConvexProgram build_power_subproblem(const Scenario& s,
                                          const DecisionVariables& dv);
sca::ConvexProgram build_blocklength_subproblem(const Scenario& s,
                                                const DecisionVariables& dv);
sca::ConvexProgram build_trajectory_subproblem(const Scenario& s,
                                               const DecisionVariables& dv);

/// Floors the relaxed blocklengths and re-derives tau from the true rates.
/// Throws std::logic_error if any of C5/C6/C9/C10 breaks (cannot happen:
/// floor only shrinks the budget sums).
DecisionVariables round_blocklengths(const Scenario& s,
                                     const DecisionVariables& dv_relaxed);

/// Residuals of the mobility/resource constraints C1-C9 at dv (<= 0 when
/// satisfied) plus the worst integrality gap of the blocklengths.
struct ConstraintResiduals {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0;
    double c6 = 0.0, c7 = 0.0, c8 = 0.0, c9 = 0.0;
    double integrality = 0.0;
    double max_c1_to_c9() const;
};
ConstraintResiduals check_constraints(const Scenario& s,
                                      const DecisionVariables& dv);

/// Block successive convex approximation (power -> blocklength -> trajectory)
/// from the initial feasible point until the EAST delta drops below epsilon;
/// blocklengths are rounded once at the end.
RunResult run_bsca(const Scenario& s, const PlannerOptions& opts = {});

/// Benchmark: resource design with the trajectory frozen at the initial line.
RunResult run_rdft(const Scenario& s, const PlannerOptions& opts = {});

/// Benchmark: trajectory design with powers/blocklengths frozen at the
/// initial values.
RunResult run_tdfr(const Scenario& s, const PlannerOptions& opts = {});

/// No optimization: evaluate the initial feasible configuration.
RunResult run_initial(const Scenario& s, const PlannerOptions& opts = {});

} // namespace east::planner
