#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <sstream>

#include "east/program.hpp"
#include "east/rng.hpp"
#include "east/solver.hpp"

using namespace east;
using doctest::Approx;
using sca::AffineExpr;
using sca::ConvexProgram;

TEST_CASE("LP corner") {
    ConvexProgram p;
    auto x = p.add_var("x", 0.0, sca::kInf, 1.0);
    p.set_objective(x, 1.0);
    sca::AffineAtom a;
    a.rel = sca::Rel::le;
    a.expr.add(x, 1.0).add_const(-3.0);
    p.add_atom(std::move(a));

    auto rep = solver::solve(p);
    CHECK(rep.status == solver::Status::optimal);
    CHECK(rep.objective == Approx(3.0).epsilon(1e-6));
    CHECK(rep.max_constraint_violation <= 1e-8);
    CHECK(rep.stationarity_residual <= 1e-6);
}

TEST_CASE("log constraint optimum at ln 2") {
    ConvexProgram p;
    auto x = p.add_var("x", 0.0, 1.0, 0.5);
    auto t = p.add_var("t", -sca::kInf, sca::kInf, 0.1);
    p.set_objective(t, 1.0);
    sca::LogAffineAtom a; // ln(1+x) - t >= 0
    a.logs.push_back({1.0, AffineExpr(1.0).add(x, 1.0)});
    a.tail.add(t, -1.0);
    p.add_atom(std::move(a));

    auto rep = solver::solve(p);
    CHECK(rep.status == solver::Status::optimal);
    CHECK(rep.objective == Approx(0.6931471805599453).epsilon(1e-5));
}

TEST_CASE("second-order cone optimum at sqrt 2") {
    ConvexProgram p;
    auto x = p.add_var("x", -2.0, 2.0, 0.1);
    auto y = p.add_var("y", -2.0, 2.0, 0.1);
    auto t = p.add_var("t", -sca::kInf, sca::kInf, 0.0);
    p.set_objective(t, 1.0);
    sca::NormAffineAtom n; // ||(x, y)|| <= 1
    n.rows.push_back(AffineExpr().add(x, 1.0));
    n.rows.push_back(AffineExpr().add(y, 1.0));
    n.rhs = AffineExpr(1.0);
    p.add_atom(std::move(n));
    sca::AffineAtom a; // x + y - t >= 0
    a.rel = sca::Rel::ge;
    a.expr.add(x, 1.0).add(y, 1.0).add(t, -1.0);
    p.add_atom(std::move(a));

    auto rep = solver::solve(p);
    CHECK(rep.status == solver::Status::optimal);
    CHECK(rep.objective == Approx(1.414213562373095).epsilon(1e-5));
}

TEST_CASE("rotated cone via QUAD_OVER_AFFINE") {
    // maximize t s.t. t^2 <= x y, x + y <= 2  ->  t = 1 at x = y = 1
    ConvexProgram p;
    auto x = p.add_var("x", 1e-6, 5.0, 0.4);
    auto y = p.add_var("y", 1e-6, 5.0, 0.4);
    auto t = p.add_var("t", -sca::kInf, sca::kInf, 0.1);
    p.set_objective(t, 1.0);
    sca::QuadOverAffineAtom q;
    q.rows.push_back(AffineExpr().add(t, 1.0));
    q.f1.add(x, 1.0);
    q.f2.add(y, 1.0);
    p.add_atom(std::move(q));
    sca::AffineAtom a;
    a.rel = sca::Rel::le;
    a.expr.add(x, 1.0).add(y, 1.0).add_const(-2.0);
    p.add_atom(std::move(a));

    auto rep = solver::solve(p);
    CHECK(rep.status == solver::Status::optimal);
    CHECK(rep.objective == Approx(1.0).epsilon(1e-5));
}

TEST_CASE("log-ratio atom optimum") {
    // maximize t s.t. ln(u/(1+u)) + 1 >= t, u <= 10:
    // optimum t = 1 - ln(1.1) at u = 10.
    ConvexProgram p;
    auto u = p.add_var("u", 1e-9, 10.0, 1.0);
    auto t = p.add_var("t", -sca::kInf, sca::kInf, -1.0);
    p.set_objective(t, 1.0);
    sca::LogRatioAtom a;
    a.u = u;
    a.tail.add(t, -1.0).add_const(1.0);
    p.add_atom(std::move(a));

    auto rep = solver::solve(p);
    CHECK(rep.status == solver::Status::optimal);
    CHECK(rep.objective == Approx(0.9046898201956751).epsilon(1e-5));
}

TEST_CASE("infeasible or boundary warm starts are rejected") {
    ConvexProgram p;
    auto x = p.add_var("x", 0.0, 1.0, 0.0); // exactly on the lower bound
    p.set_objective(x, 1.0);
    auto rep = solver::solve(p);
    CHECK(rep.status == solver::Status::infeasible_start);
}

TEST_CASE("equality atoms are rejected") {
    ConvexProgram p;
    auto x = p.add_var("x", 0.0, 1.0, 0.5);
    sca::AffineAtom a;
    a.rel = sca::Rel::eq;
    a.expr.add(x, 1.0).add_const(-0.25);
    p.add_atom(std::move(a));
    CHECK_THROWS_AS(solver::solve(p), std::invalid_argument);
}

TEST_CASE("pinned variables are eliminated") {
    ConvexProgram p;
    auto x = p.add_var("x", 2.0, 2.0, 2.0);
    auto y = p.add_var("y", 0.0, 10.0, 1.0);
    p.set_objective(x, 1.0);
    p.set_objective(y, 1.0);
    sca::AffineAtom a; // y <= x (= 2)
    a.rel = sca::Rel::le;
    a.expr.add(y, 1.0).add(x, -1.0);
    p.add_atom(std::move(a));
    auto rep = solver::solve(p);
    CHECK(rep.status == solver::Status::optimal);
    CHECK(rep.point[0] == 2.0);
    CHECK(rep.objective == Approx(4.0).epsilon(1e-5));
}

TEST_CASE("deterministic: identical program gives bit-identical report") {
    ConvexProgram p;
    auto x = p.add_var("x", 0.0, 3.0, 1.0);
    auto y = p.add_var("y", 0.0, 3.0, 1.0);
    p.set_objective(x, 1.0);
    p.set_objective(y, 0.5);
    sca::LogAffineAtom a;
    a.logs.push_back({1.0, AffineExpr(1.0).add(x, 0.7).add(y, 0.2)});
    a.tail.add_const(0.3).add(y, -0.11);
    p.add_atom(std::move(a));

    auto r1 = solver::solve(p);
    auto r2 = solver::solve(p);
    CHECK(r1.objective == r2.objective);
    CHECK(r1.point == r2.point);
    CHECK(r1.barrier_iterations == r2.barrier_iterations);
    CHECK(r1.stationarity_residual == r2.stationarity_residual);
}

TEST_CASE("stage trace shows the best objective is nondecreasing") {
    ConvexProgram p;
    auto x = p.add_var("x", 0.0, sca::kInf, 0.5);
    p.set_objective(x, 1.0);
    sca::AffineAtom a;
    a.rel = sca::Rel::le;
    a.expr.add(x, 1.0).add_const(-2.0);
    p.add_atom(std::move(a));

    std::ostringstream trace;
    solver::SolverOptions opts;
    opts.trace = &trace;
    auto rep = solver::solve(p, opts);
    CHECK(rep.status == solver::Status::optimal);

    double best = -1e300;
    int stages = 0;
    std::string line;
    std::istringstream in(trace.str());
    while (std::getline(in, line)) {
        auto pos = line.find("objective=");
        REQUIRE(pos != std::string::npos);
        double obj = std::stod(line.substr(pos + 10));
        CHECK(std::max(best, obj) >= best - 1e-8);
        best = std::max(best, obj);
        ++stages;
    }
    CHECK(stages >= 5);
    CHECK(best == Approx(rep.objective).epsilon(1e-6));
}

// Randomized small programs cross-checked against a two-level grid search.
namespace {

struct RandomProgram {
    ConvexProgram prog;
    std::vector<double> lo, hi; // search box (finite bounds)
};

RandomProgram make_random_program(int seed) {
    RandomProgram rp;
    ConvexProgram& p = rp.prog;
    int nvars = 1 + static_cast<int>(rng::uniform01(seed, 0, 0) * 3.0); // 1..3
    for (int v = 0; v < nvars; ++v) {
        double lo = 0.1 + rng::uniform01(seed, 1, v);
        double hi = lo + 0.5 + 2.0 * rng::uniform01(seed, 2, v);
        double ws = 0.5 * (lo + hi);
        p.add_var("v" + std::to_string(v), lo, hi, ws);
        p.objective[v] = -1.0 + 2.0 * rng::uniform01(seed, 3, v);
        rp.lo.push_back(lo);
        rp.hi.push_back(hi);
    }
    std::vector<double> center = p.warm_start;

    int natoms = 1 + static_cast<int>(rng::uniform01(seed, 4, 0) * 3.0);
    for (int a = 0; a < natoms; ++a) {
        int kind = static_cast<int>(rng::uniform01(seed, 5, a) * 4.0);
        switch (kind) {
        case 0: {
            sca::AffineAtom atom;
            atom.rel = sca::Rel::le;
            for (int v = 0; v < nvars; ++v)
                atom.expr.add(sca::VarRef{v},
                              -1.0 + 2.0 * rng::uniform01(seed, 6, a * 8 + v));
            double at_center = atom.expr.eval(center);
            atom.expr.add_const(-at_center - 0.4); // strictly feasible at center
            p.add_atom(std::move(atom));
            break;
        }
        case 1: {
            sca::LogAffineAtom atom;
            for (int v = 0; v < nvars; ++v)
                atom.logs.push_back(
                    {0.2 + rng::uniform01(seed, 7, a * 8 + v),
                     AffineExpr(0.05).add(sca::VarRef{v}, 1.0)}); // > 0 on box
            for (int v = 0; v < nvars; ++v)
                atom.tail.add(sca::VarRef{v},
                              -0.5 + rng::uniform01(seed, 8, a * 8 + v));
            bool ok = true;
            double at_center = atom.tail.eval(center);
            for (auto& t : atom.logs)
                at_center += t.coef * std::log(t.arg.eval(center));
            (void)ok;
            atom.tail.add_const(-at_center + 0.4);
            p.add_atom(std::move(atom));
            break;
        }
        case 2: {
            sca::QuadOverAffineAtom atom;
            atom.rows.push_back(
                AffineExpr(-center[0]).add(sca::VarRef{0}, 1.0));
            atom.f1 = AffineExpr(0.2).add(sca::VarRef{nvars - 1}, 0.5);
            atom.f2 = AffineExpr(2.0 + 2.0 * rng::uniform01(seed, 9, a));
            p.add_atom(std::move(atom));
            break;
        }
        default: {
            sca::NormAffineAtom atom;
            for (int v = 0; v < nvars; ++v)
                atom.rows.push_back(
                    AffineExpr(-center[v]).add(sca::VarRef{v}, 1.0));
            atom.rhs = AffineExpr(1.0 + 2.0 * rng::uniform01(seed, 10, a));
            p.add_atom(std::move(atom));
            break;
        }
        }
    }
    return rp;
}

double grid_best(const RandomProgram& rp, std::vector<double> lo,
                 std::vector<double> hi, int steps) {
    const ConvexProgram& p = rp.prog;
    int n = p.num_vars();
    std::vector<int> idx(n, 0);
    std::vector<double> x(n);
    double best = -1e300;
    while (true) {
        for (int v = 0; v < n; ++v)
            x[v] = lo[v] + (hi[v] - lo[v]) * idx[v] / double(steps - 1);
        bool feas = true;
        for (int v = 0; v < n && feas; ++v)
            if (x[v] < p.lower[v] || x[v] > p.upper[v]) feas = false;
        for (const auto& atom : p.atoms) {
            if (!feas) break;
            if (sca::atom_violation(atom, x) > 1e-12) feas = false;
        }
        if (feas) {
            double obj = 0.0;
            for (int v = 0; v < n; ++v) obj += p.objective[v] * x[v];
            best = std::max(best, obj);
        }
        int v = 0;
        while (v < n && ++idx[v] == steps) idx[v++] = 0;
        if (v == n) break;
    }
    return best;
}

} // namespace

TEST_CASE("random small programs match a grid-search oracle") {
    int solved = 0;
    for (int seed = 100; seed < 150; ++seed) {
        RandomProgram rp = make_random_program(seed);
        auto rep = solver::solve(rp.prog);
        REQUIRE(rep.status == solver::Status::optimal);

        // level 1: coarse grid over the whole box; level 2: refined box
        // around the solver's answer.
        int steps = rp.prog.num_vars() <= 2 ? 201 : 61;
        double coarse = grid_best(rp, rp.lo, rp.hi, steps);
        std::vector<double> lo2(rp.lo), hi2(rp.hi);
        for (int v = 0; v < rp.prog.num_vars(); ++v) {
            double span = (rp.hi[v] - rp.lo[v]) / (steps - 1) * 2.0;
            lo2[v] = std::max(rp.lo[v], rep.point[v] - span);
            hi2[v] = std::min(rp.hi[v], rep.point[v] + span);
        }
        double fine = grid_best(rp, lo2, hi2, 41);
        double oracle = std::max(coarse, fine);

        double tol = 1e-3 * std::max(1.0, std::abs(oracle));
        CHECK(rep.objective >= oracle - tol);
        CHECK(rep.objective <= oracle + tol);
        ++solved;
    }
    CHECK(solved == 50);
}
