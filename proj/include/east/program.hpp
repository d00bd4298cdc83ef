#pragma once

#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace east::sca {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Handle to one variable of a ConvexProgram.
struct VarRef {
    int index = -1;
    explicit operator bool() const { return index >= 0; }
};

/// Sparse affine expression  sum_i coef_i x_i + constant.
struct AffineExpr {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    AffineExpr() = default;
    explicit AffineExpr(double c) : constant(c) {}
    AffineExpr& add(VarRef v, double coef) {
        if (coef != 0.0) terms.emplace_back(v.index, coef);
        return *this;
    }
    AffineExpr& add_const(double c) {
        constant += c;
        return *this;
    }
    double eval(std::span<const double> x) const {
        double v = constant;
        for (auto [i, c] : terms) v += c * x[i];
        return v;
    }
};

enum class Rel { le, ge, eq };

/// expr <= 0, expr >= 0, or expr == 0.
struct AffineAtom {
    AffineExpr expr;
    Rel rel = Rel::ge;
};

struct LogTerm {
    double coef = 1.0; // must be > 0
    AffineExpr arg;    // must stay > 0
};

/// sum_j coef_j ln(arg_j(x)) + tail(x) >= 0.
struct LogAffineAtom {
    std::vector<LogTerm> logs;
    AffineExpr tail;
};

/// ln(u / (1 + u)) + sum_j coef_j ln(arg_j(x)) + tail(x) >= 0 for a single
/// positive scalar variable u; encodes -ln(1 + 1/u).
struct LogRatioAtom {
    VarRef u;
    std::vector<LogTerm> logs;
    AffineExpr tail;
};

/// ||rows(x)||^2 <= f1(x) * f2(x), both factors > 0 (rotated cone).
struct QuadOverAffineAtom {
    std::vector<AffineExpr> rows;
    AffineExpr f1, f2;
};

/// ||rows(x)|| <= rhs(x) (second-order cone).
struct NormAffineAtom {
    std::vector<AffineExpr> rows;
    AffineExpr rhs;
};

using ConstraintAtom = std::variant<AffineAtom, LogAffineAtom, LogRatioAtom,
                                    QuadOverAffineAtom, NormAffineAtom>;

/// Signed violation of an atom at x: <= 0 iff satisfied. Domain breaches
/// (e.g. a log argument <= 0) report a large positive value.
double atom_violation(const ConstraintAtom& atom, std::span<const double> x);

/// Solver-agnostic convex program: bounded variables, linear objective
/// (maximize), constraint atoms, and a strictly feasible warm start.
struct ConvexProgram {
    std::vector<std::string> tags;
    std::vector<double> lower, upper;
    std::vector<double> objective;
    std::vector<double> warm_start;
    std::vector<ConstraintAtom> atoms;

    int num_vars() const { return static_cast<int>(tags.size()); }

    VarRef add_var(std::string tag, double lb, double ub, double ws) {
        tags.push_back(std::move(tag));
        lower.push_back(lb);
        upper.push_back(ub);
        objective.push_back(0.0);
        warm_start.push_back(ws);
        return VarRef{num_vars() - 1};
    }
    void set_objective(VarRef v, double coef) { objective[v.index] = coef; }
    void add_atom(ConstraintAtom a) { atoms.push_back(std::move(a)); }
};

/// Human-readable listing (variables, bounds, atoms) for diffing in tests.
std::string dump(const ConvexProgram& p);

} // namespace east::sca
