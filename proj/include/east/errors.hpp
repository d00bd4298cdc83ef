#pragma once

#include <stdexcept>
#include <string>

namespace east {

/// Scenario or input-file content violates an invariant.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input file could not be parsed at all.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A convex subproblem solve failed during planning.
struct SolverFailure : std::runtime_error {
    int iteration = -1;
    std::string block;
    SolverFailure(std::string msg, int iter, std::string blk)
        : std::runtime_error(std::move(msg)), iteration(iter), block(std::move(blk)) {}
};

} // namespace east
