#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "east/program.hpp"

namespace east::solver {

enum class Status { optimal, max_iter, infeasible_start, numerical_failure };

const char* to_string(Status s);

struct SolverOptions {
    double feas_tol = 1e-8;
    double kkt_tol = 1e-6;           // bound on the final Newton decrement and
                                     // on the barrier duality gap m * mu
    int max_newton_per_stage = 50;
    double barrier_reduction = 0.2;  // mu multiplier per outer stage
    double initial_barrier_weight = 1.0;
    std::ostream* trace = nullptr;   // optional per-stage trace records
};

struct SolveReport {
    Status status = Status::numerical_failure;
    std::vector<double> point;
    double objective = 0.0;
    double max_constraint_violation = 0.0;
    double stationarity_residual = 0.0; // Newton decrement of the final stage
    int barrier_iterations = 0;         // total Newton steps
};

/// Primal log-barrier solve of a ConvexProgram (maximize objective^T x).
/// The warm start must strictly satisfy every atom interior and every finite
/// bound; equality atoms are not supported (builders pin variables through
/// equal bounds instead, which the solver eliminates).
SolveReport solve(const sca::ConvexProgram& p, const SolverOptions& opts = {});

struct FeasibilityReport {
    double max_violation = 0.0;
    std::vector<double> per_atom;        // signed, <= 0 means satisfied
    std::vector<double> bound_violation; // per variable
};

/// Exact constraint residuals via the independent dense evaluator.
FeasibilityReport check_feasibility(const sca::ConvexProgram& p,
                                    std::span<const double> x);

/// Interior margins as the solver's barrier computes them (one entry per
/// atom); exposed so tests can cross-check against atom_violation.
std::vector<double> solver_margins(const sca::ConvexProgram& p,
                                   std::span<const double> x);

} // namespace east::solver
