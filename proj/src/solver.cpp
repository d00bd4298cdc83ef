#include "east/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace east::solver {

using sca::AffineAtom;
using sca::AffineExpr;
using sca::ConstraintAtom;
using sca::ConvexProgram;
using sca::LogAffineAtom;
using sca::LogRatioAtom;
using sca::NormAffineAtom;
using sca::QuadOverAffineAtom;
using sca::Rel;

const char* to_string(Status s) {
    switch (s) {
    case Status::optimal: return "optimal";
    case Status::max_iter: return "max_iter";
    case Status::infeasible_start: return "infeasible_start";
    case Status::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

namespace {

// Affine atoms whose variable footprint spans more than this many reduced
// indices are treated as dense rows (Sherman-Morrison-Woodbury) instead of
// being folded into the banded Hessian.
constexpr int kDenseRowSpread = 48;

struct BandAtom {
    const ConstraintAtom* atom = nullptr;
    std::vector<int> foot;      // full-space variable indices, sorted
    std::vector<int> foot_red;  // reduced indices (all >= 0)
    int loc_of_full(int f) const {
        for (size_t i = 0; i < foot.size(); ++i)
            if (foot[i] == f) return static_cast<int>(i);
        return -1;
    }
};

struct DenseRow {
    // Margin h(x) = sum coef*x + c0, interior requires h > 0.
    std::vector<std::pair<int, double>> terms_red;
    std::vector<std::pair<int, double>> terms_full;
    double c0 = 0.0;
};

void collect_footprint(const AffineExpr& e, std::vector<int>& out,
                       const std::vector<int>& red_of_full) {
    for (auto [i, c] : e.terms)
        if (red_of_full[i] >= 0) out.push_back(i);
}

std::vector<int> atom_footprint(const ConstraintAtom& atom,
                                const std::vector<int>& red_of_full) {
    std::vector<int> f;
    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, AffineAtom>) {
                collect_footprint(a.expr, f, red_of_full);
            } else if constexpr (std::is_same_v<T, LogAffineAtom>) {
                for (const auto& t : a.logs) collect_footprint(t.arg, f, red_of_full);
                collect_footprint(a.tail, f, red_of_full);
            } else if constexpr (std::is_same_v<T, LogRatioAtom>) {
                if (red_of_full[a.u.index] >= 0) f.push_back(a.u.index);
                for (const auto& t : a.logs) collect_footprint(t.arg, f, red_of_full);
                collect_footprint(a.tail, f, red_of_full);
            } else if constexpr (std::is_same_v<T, QuadOverAffineAtom>) {
                for (const auto& r : a.rows) collect_footprint(r, f, red_of_full);
                collect_footprint(a.f1, f, red_of_full);
                collect_footprint(a.f2, f, red_of_full);
            } else {
                static_assert(std::is_same_v<T, NormAffineAtom>);
                for (const auto& r : a.rows) collect_footprint(r, f, red_of_full);
                collect_footprint(a.rhs, f, red_of_full);
            }
        },
        atom);
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    return f;
}

// Margin of one atom (h > 0 on the interior). Returns -inf when outside the
// atom's domain.
double atom_margin(const ConstraintAtom& atom, std::span<const double> x) {
    constexpr double bad = -std::numeric_limits<double>::infinity();
    return std::visit(
        [&](const auto& a) -> double {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, AffineAtom>) {
                double v = a.expr.eval(x);
                return a.rel == Rel::le ? -v : v; // eq rejected earlier
            } else if constexpr (std::is_same_v<T, LogAffineAtom>) {
                double s = a.tail.eval(x);
                for (const auto& t : a.logs) {
                    double g = t.arg.eval(x);
                    if (!(g > 0.0)) return bad;
                    s += t.coef * std::log(g);
                }
                return s;
            } else if constexpr (std::is_same_v<T, LogRatioAtom>) {
                double u = x[a.u.index];
                if (!(u > 0.0)) return bad;
                double s = std::log(u) - std::log1p(u) + a.tail.eval(x);
                for (const auto& t : a.logs) {
                    double g = t.arg.eval(x);
                    if (!(g > 0.0)) return bad;
                    s += t.coef * std::log(g);
                }
                return s;
            } else if constexpr (std::is_same_v<T, QuadOverAffineAtom>) {
                double f1 = a.f1.eval(x), f2 = a.f2.eval(x);
                if (!(f1 > 0.0) || !(f2 > 0.0)) return bad;
                double q = 0.0;
                for (const auto& r : a.rows) {
                    double v = r.eval(x);
                    q += v * v;
                }
                return f1 * f2 - q;
            } else {
                static_assert(std::is_same_v<T, NormAffineAtom>);
                double rhs = a.rhs.eval(x);
                if (!(rhs > 0.0)) return bad;
                double q = 0.0;
                for (const auto& r : a.rows) {
                    double v = r.eval(x);
                    q += v * v;
                }
                return rhs * rhs - q;
            }
        },
        atom);
}

// Symmetric banded matrix, lower storage: entry (i, i-d) at data[i*(bw+1)+d].
// factor() applies Jacobi equilibration first: the barrier Hessian mixes
// variable scales spanning many decades and the scaled factorization keeps
// full precision.
struct BandMatrix {
    int n = 0, bw = 0;
    std::vector<double> data;
    std::vector<double> scale; // d_i = 1/sqrt(H_ii), applied symmetrically

    void init(int n_, int bw_) {
        n = n_;
        bw = bw_;
        data.assign(static_cast<size_t>(n) * (bw + 1), 0.0);
        scale.assign(n, 1.0);
    }
    void zero() { std::fill(data.begin(), data.end(), 0.0); }
    double& at(int i, int j) { // requires i >= j, i - j <= bw
        return data[static_cast<size_t>(i) * (bw + 1) + (i - j)];
    }
    void add(int i, int j, double v) {
        if (i < j) std::swap(i, j);
        data[static_cast<size_t>(i) * (bw + 1) + (i - j)] += v;
    }

    // In-place Cholesky of D H D; returns false if a pivot is not strictly
    // positive.
    bool factor() {
        for (int i = 0; i < n; ++i) {
            double d = at(i, i);
            if (!(d > 0.0) || !std::isfinite(d)) return false;
            scale[i] = 1.0 / std::sqrt(d);
        }
        for (int i = 0; i < n; ++i) {
            int j0 = std::max(0, i - bw);
            for (int j = j0; j <= i; ++j) at(i, j) *= scale[i] * scale[j];
        }
        for (int j = 0; j < n; ++j) {
            double d = at(j, j);
            int k0 = std::max(0, j - bw);
            for (int k = k0; k < j; ++k) {
                double l = at(j, k);
                d -= l * l;
            }
            if (!(d > 0.0) || !std::isfinite(d)) return false;
            double dj = std::sqrt(d);
            at(j, j) = dj;
            int iend = std::min(n - 1, j + bw);
            for (int i = j + 1; i <= iend; ++i) {
                double s = at(i, j);
                int kk0 = std::max({0, i - bw, j - bw});
                for (int k = kk0; k < j; ++k) s -= at(i, k) * at(j, k);
                at(i, j) = s / dj;
            }
        }
        return true;
    }

    // Solve H x = b via D (L L^T) D with the factored data.
    void solve(std::vector<double>& b) const {
        const auto& L = data;
        for (int i = 0; i < n; ++i) b[i] *= scale[i];
        for (int i = 0; i < n; ++i) {
            double s = b[i];
            int k0 = std::max(0, i - bw);
            for (int k = k0; k < i; ++k)
                s -= L[static_cast<size_t>(i) * (bw + 1) + (i - k)] * b[k];
            b[i] = s / L[static_cast<size_t>(i) * (bw + 1)];
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = b[i];
            int kend = std::min(n - 1, i + bw);
            for (int k = i + 1; k <= kend; ++k)
                s -= L[static_cast<size_t>(k) * (bw + 1) + (k - i)] * b[k];
            b[i] = s / L[static_cast<size_t>(i) * (bw + 1)];
        }
        for (int i = 0; i < n; ++i) b[i] *= scale[i];
    }
};

struct Workspace {
    const ConvexProgram& p;
    int n_full = 0, n_red = 0;
    std::vector<int> red_of_full; // -1 when pinned
    std::vector<int> full_of_red;
    std::vector<double> x_full;   // pinned entries always hold their value

    std::vector<BandAtom> band_atoms;
    std::vector<DenseRow> dense_rows;
    int bw = 0;
    int barrier_terms = 0;

    // scratch
    BandMatrix H;

    explicit Workspace(const ConvexProgram& prog) : p(prog) {
        n_full = prog.num_vars();
        red_of_full.assign(n_full, -1);
        x_full.assign(n_full, 0.0);
        for (int i = 0; i < n_full; ++i) {
            if (prog.lower[i] == prog.upper[i]) {
                x_full[i] = prog.lower[i]; // pinned
            } else {
                red_of_full[i] = n_red++;
                full_of_red.push_back(i);
            }
        }

        for (const auto& atom : prog.atoms) {
            if (const auto* aff = std::get_if<AffineAtom>(&atom)) {
                if (aff->rel == Rel::eq)
                    throw std::invalid_argument(
                        "solver: equality atoms are not supported; pin variables "
                        "via equal bounds instead");
            }
            auto foot = atom_footprint(atom, red_of_full);
            int spread = foot.empty()
                             ? 0
                             : red_of_full[foot.back()] - red_of_full[foot.front()];
            const auto* aff = std::get_if<AffineAtom>(&atom);
            if (aff && spread > kDenseRowSpread) {
                DenseRow row;
                double sgn = aff->rel == Rel::le ? -1.0 : 1.0;
                row.c0 = sgn * aff->expr.constant;
                for (auto [i, c] : aff->expr.terms) {
                    if (red_of_full[i] >= 0) {
                        row.terms_red.emplace_back(red_of_full[i], sgn * c);
                        row.terms_full.emplace_back(i, sgn * c);
                    } else {
                        row.c0 += sgn * c * x_full[i];
                    }
                }
                dense_rows.push_back(std::move(row));
            } else {
                BandAtom ba;
                ba.atom = &atom;
                ba.foot = std::move(foot);
                for (int f : ba.foot) ba.foot_red.push_back(red_of_full[f]);
                bw = std::max(bw, spread);
                band_atoms.push_back(std::move(ba));
            }
        }

        barrier_terms = static_cast<int>(p.atoms.size());
        for (int i = 0; i < n_full; ++i) {
            if (red_of_full[i] < 0) continue;
            if (std::isfinite(p.lower[i])) ++barrier_terms;
            if (std::isfinite(p.upper[i])) ++barrier_terms;
        }

        H.init(n_red, std::min(bw, std::max(0, n_red - 1)));
    }

    void load(std::span<const double> x_red) {
        for (int r = 0; r < n_red; ++r) x_full[full_of_red[r]] = x_red[r];
    }

    // Barrier value sum(-ln h) over atoms, dense rows and bounds; +inf when
    // any margin is nonpositive.
    double barrier_value() {
        double phi = 0.0;
        for (const auto& ba : band_atoms) {
            double h = atom_margin(*ba.atom, x_full);
            if (!(h > 0.0)) return std::numeric_limits<double>::infinity();
            phi -= std::log(h);
        }
        for (const auto& row : dense_rows) {
            double h = row.c0;
            for (auto [r, c] : row.terms_red) h += c * x_full[full_of_red[r]];
            if (!(h > 0.0)) return std::numeric_limits<double>::infinity();
            phi -= std::log(h);
        }
        for (int r = 0; r < n_red; ++r) {
            int i = full_of_red[r];
            double xi = x_full[i];
            if (std::isfinite(p.lower[i])) {
                double s = xi - p.lower[i];
                if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
                phi -= std::log(s);
            }
            if (std::isfinite(p.upper[i])) {
                double s = p.upper[i] - xi;
                if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
                phi -= std::log(s);
            }
        }
        return phi;
    }
};

// Gradient and Hessian of -ln(h(x)) for one banded atom, scattered into the
// global structures. Returns false when the point left the atom's domain.
bool accumulate_atom(const BandAtom& ba, std::span<const double> x,
                     double mu, std::vector<double>& grad, BandMatrix& H) {
    const int k = static_cast<int>(ba.foot.size());
    if (k > 24)
        throw std::invalid_argument("solver: non-affine atom touches more than "
                                    "24 free variables");
    double gh[24];   // grad of h over footprint
    double hh[576];  // Hessian of h over footprint (row-major k x k)
    std::fill(gh, gh + k, 0.0);
    std::fill(hh, hh + k * k, 0.0);
    // The margin must come from the same routine the line search uses, so a
    // point accepted there can never be seen as out-of-domain here.
    const double h = atom_margin(*ba.atom, x);
    if (!(h > 0.0)) return false;

    auto loc = [&](int full) { return ba.loc_of_full(full); };
    auto add_affine_grad = [&](const AffineExpr& e, double w) {
        for (auto [i, c] : e.terms) {
            int l = loc(i);
            if (l >= 0) gh[l] += w * c;
        }
    };
    // rank-1 update of hh: w * a a^T where a is an affine row's coefficients
    auto add_outer = [&](const AffineExpr& e, double w) {
        for (auto [i, c] : e.terms) {
            int li = loc(i);
            if (li < 0) continue;
            for (auto [j, d] : e.terms) {
                int lj = loc(j);
                if (lj >= 0) hh[li * k + lj] += w * c * d;
            }
        }
    };
    auto add_cross = [&](const AffineExpr& e1, const AffineExpr& e2, double w) {
        for (auto [i, c] : e1.terms) {
            int li = loc(i);
            if (li < 0) continue;
            for (auto [j, d] : e2.terms) {
                int lj = loc(j);
                if (lj >= 0) {
                    hh[li * k + lj] += w * c * d;
                    hh[lj * k + li] += w * c * d;
                }
            }
        }
    };

    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, AffineAtom>) {
                add_affine_grad(a.expr, a.rel == Rel::le ? -1.0 : 1.0);
            } else if constexpr (std::is_same_v<T, LogAffineAtom>) {
                add_affine_grad(a.tail, 1.0);
                for (const auto& t : a.logs) {
                    double g = t.arg.eval(x); // > 0, certified by atom_margin
                    add_affine_grad(t.arg, t.coef / g);
                    add_outer(t.arg, -t.coef / (g * g));
                }
            } else if constexpr (std::is_same_v<T, LogRatioAtom>) {
                double u = x[a.u.index];
                add_affine_grad(a.tail, 1.0);
                int lu = loc(a.u.index);
                if (lu >= 0) {
                    gh[lu] += 1.0 / (u * (1.0 + u));
                    hh[lu * k + lu] +=
                        -1.0 / (u * u) + 1.0 / ((1.0 + u) * (1.0 + u));
                }
                for (const auto& t : a.logs) {
                    double g = t.arg.eval(x);
                    add_affine_grad(t.arg, t.coef / g);
                    add_outer(t.arg, -t.coef / (g * g));
                }
            } else if constexpr (std::is_same_v<T, QuadOverAffineAtom>) {
                double f1 = a.f1.eval(x), f2 = a.f2.eval(x);
                add_affine_grad(a.f1, f2);
                add_affine_grad(a.f2, f1);
                add_cross(a.f1, a.f2, 1.0);
                for (const auto& r : a.rows) {
                    double v = r.eval(x);
                    add_affine_grad(r, -2.0 * v);
                    add_outer(r, -2.0);
                }
            } else {
                static_assert(std::is_same_v<T, NormAffineAtom>);
                double rhs = a.rhs.eval(x);
                add_affine_grad(a.rhs, 2.0 * rhs);
                add_outer(a.rhs, 2.0);
                for (const auto& r : a.rows) {
                    double v = r.eval(x);
                    add_affine_grad(r, -2.0 * v);
                    add_outer(r, -2.0);
                }
            }
        },
        *ba.atom);

    // -ln h: grad -gh/h, Hessian gh gh^T / h^2 - hh / h, times mu.
    const double inv_h = 1.0 / h;
    for (int i = 0; i < k; ++i) {
        int ri = ba.foot_red[i];
        grad[ri] += mu * (-gh[i] * inv_h);
        for (int j = 0; j <= i; ++j) {
            int rj = ba.foot_red[j];
            double v = gh[i] * gh[j] * inv_h * inv_h - hh[i * k + j] * inv_h;
            H.add(ri, rj, mu * v);
        }
    }
    return true;
}

} // namespace

FeasibilityReport check_feasibility(const ConvexProgram& p,
                                    std::span<const double> x) {
    FeasibilityReport rep;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    rep.per_atom.reserve(p.atoms.size());
    for (const auto& atom : p.atoms) {
        double v = sca::atom_violation(atom, x);
        rep.per_atom.push_back(v);
        rep.max_violation = std::max(rep.max_violation, v);
    }
    rep.bound_violation.resize(p.num_vars());
    for (int i = 0; i < p.num_vars(); ++i) {
        double v = std::max(p.lower[i] - x[i], x[i] - p.upper[i]);
        rep.bound_violation[i] = v;
        rep.max_violation = std::max(rep.max_violation, v);
    }
    if (rep.per_atom.empty() && rep.bound_violation.empty())
        rep.max_violation = 0.0;
    return rep;
}

std::vector<double> solver_margins(const ConvexProgram& p,
                                   std::span<const double> x) {
    std::vector<double> out;
    out.reserve(p.atoms.size());
    for (const auto& atom : p.atoms) out.push_back(atom_margin(atom, x));
    return out;
}

SolveReport solve(const ConvexProgram& p, const SolverOptions& opts) {
    Workspace w(p);
    SolveReport rep;
    rep.point = p.warm_start;

    if (static_cast<int>(p.warm_start.size()) != w.n_full)
        throw std::invalid_argument("solver: warm start size mismatch");

    // Seed x_full with the warm start (pinned entries forced to their value).
    for (int i = 0; i < w.n_full; ++i)
        if (w.red_of_full[i] < 0 && std::abs(p.warm_start[i] - w.x_full[i]) >
                                        1e-9 * std::max(1.0, std::abs(w.x_full[i])))
            rep.status = Status::infeasible_start;
    std::vector<double> x(w.n_red);
    for (int r = 0; r < w.n_red; ++r) x[r] = p.warm_start[w.full_of_red[r]];
    w.load(x);

    auto objective_full = [&]() {
        double v = 0.0;
        for (int i = 0; i < w.n_full; ++i) v += p.objective[i] * w.x_full[i];
        return v;
    };

    // Strict interior check.
    if (rep.status != Status::infeasible_start) {
        bool interior = std::isfinite(w.barrier_value());
        for (int r = 0; r < w.n_red && interior; ++r) {
            int i = w.full_of_red[r];
            if (std::isfinite(p.lower[i]) && !(x[r] > p.lower[i])) interior = false;
            if (std::isfinite(p.upper[i]) && !(x[r] < p.upper[i])) interior = false;
        }
        if (!interior) rep.status = Status::infeasible_start;
    }
    if (rep.status == Status::infeasible_start) {
        rep.objective = objective_full();
        rep.max_constraint_violation =
            check_feasibility(p, rep.point).max_violation;
        rep.stationarity_residual = std::numeric_limits<double>::infinity();
        return rep;
    }

    if (w.n_red == 0) {
        // Everything pinned; nothing to optimize.
        rep.status = Status::optimal;
        rep.point = w.x_full;
        rep.objective = objective_full();
        rep.max_constraint_violation =
            check_feasibility(p, rep.point).max_violation;
        return rep;
    }

    const double gap_tol = opts.kkt_tol;
    double mu = opts.initial_barrier_weight;
    const int m = w.barrier_terms;
    int total_newton = 0;
    double decrement = std::numeric_limits<double>::infinity();
    bool failed = false;
    bool stalled = false; // barrier centering hit float-precision limits

    std::vector<double> dir(w.n_red), xtrial(w.n_red), g(w.n_red);

    int stage = 0;
    while (true) {
        const bool final_stage = (m * mu <= gap_tol);
        const double stage_tol2 =
            final_stage ? opts.kkt_tol * opts.kkt_tol : std::max(1e-12, 0.01 * mu);

        int it = 0;
        for (; it < opts.max_newton_per_stage; ++it) {
            // Assemble gradient and Hessian of phi = -obj^T x + mu * Phi(x).
            w.H.zero();
            std::fill(g.begin(), g.end(), 0.0);
            for (int r = 0; r < w.n_red; ++r)
                g[r] = -p.objective[w.full_of_red[r]];

            bool domain_ok = true;
            for (const auto& ba : w.band_atoms)
                if (!accumulate_atom(ba, w.x_full, mu, g, w.H)) {
                    domain_ok = false;
                    break;
                }
            if (!domain_ok) { failed = true; break; }

            // Bound barriers.
            for (int r = 0; r < w.n_red; ++r) {
                int i = w.full_of_red[r];
                double xi = x[r];
                if (std::isfinite(p.lower[i])) {
                    double s = xi - p.lower[i];
                    if (!(s > 0.0)) { failed = true; break; }
                    g[r] += -mu / s;
                    w.H.add(r, r, mu / (s * s));
                }
                if (std::isfinite(p.upper[i])) {
                    double s = p.upper[i] - xi;
                    if (!(s > 0.0)) { failed = true; break; }
                    g[r] += mu / s;
                    w.H.add(r, r, mu / (s * s));
                }
            }
            if (failed) break;

            // Dense budget rows: gradient now, Hessian via SMW later.
            std::vector<double> row_h(w.dense_rows.size());
            for (size_t kk = 0; kk < w.dense_rows.size(); ++kk) {
                const auto& row = w.dense_rows[kk];
                double h = row.c0;
                for (auto [r, c] : row.terms_red) h += c * x[r];
                if (!(h > 0.0)) { failed = true; break; }
                row_h[kk] = h;
                for (auto [r, c] : row.terms_red) g[r] += -mu * c / h;
            }
            if (failed) break;

            // Newton direction with escalating Tikhonov regularization.
            bool solved = false;
            double reg = 0.0;
            BandMatrix Hsave = w.H;
            for (int attempt = 0; attempt < 6 && !solved; ++attempt) {
                if (attempt > 0) {
                    reg = (reg == 0.0) ? 1e-12 : reg * 1e3;
                    w.H = Hsave;
                    for (int r = 0; r < w.n_red; ++r) w.H.add(r, r, mu * reg);
                }
                if (!w.H.factor()) continue;

                // d = -H^-1 g with SMW corrections for the dense rows.
                dir.assign(g.begin(), g.end());
                for (auto& v : dir) v = -v;
                w.H.solve(dir);
                if (!w.dense_rows.empty()) {
                    const int kD = static_cast<int>(w.dense_rows.size());
                    std::vector<std::vector<double>> binv_u(kD);
                    std::vector<double> cap(static_cast<size_t>(kD) * kD, 0.0);
                    std::vector<double> utd(kD, 0.0);
                    for (int a = 0; a < kD; ++a) {
                        auto& u = binv_u[a];
                        u.assign(w.n_red, 0.0);
                        for (auto [r, c] : w.dense_rows[a].terms_red) u[r] += c;
                        for (auto [r, c] : w.dense_rows[a].terms_red)
                            utd[a] += c * dir[r];
                        w.H.solve(u);
                    }
                    for (int a = 0; a < kD; ++a) {
                        double wa = mu / (row_h[a] * row_h[a]);
                        for (int b = 0; b <= a; ++b) {
                            double s = 0.0;
                            for (auto [r, c] : w.dense_rows[b].terms_red)
                                s += c * binv_u[a][r];
                            cap[a * kD + b] = cap[b * kD + a] = s;
                        }
                        cap[a * kD + a] += 1.0 / wa;
                    }
                    // Solve (C^-1 + U^T B^-1 U) y = U^T d via small dense Cholesky.
                    std::vector<double> y = utd;
                    {
                        // in-place Cholesky on cap
                        bool ok = true;
                        for (int i2 = 0; i2 < kD && ok; ++i2) {
                            double d = cap[i2 * kD + i2];
                            for (int k2 = 0; k2 < i2; ++k2)
                                d -= cap[i2 * kD + k2] * cap[i2 * kD + k2];
                            if (!(d > 0.0)) { ok = false; break; }
                            cap[i2 * kD + i2] = std::sqrt(d);
                            for (int j2 = i2 + 1; j2 < kD; ++j2) {
                                double s = cap[j2 * kD + i2];
                                for (int k2 = 0; k2 < i2; ++k2)
                                    s -= cap[j2 * kD + k2] * cap[i2 * kD + k2];
                                cap[j2 * kD + i2] = s / cap[i2 * kD + i2];
                            }
                        }
                        if (!ok) continue;
                        for (int i2 = 0; i2 < kD; ++i2) {
                            double s = y[i2];
                            for (int k2 = 0; k2 < i2; ++k2)
                                s -= cap[i2 * kD + k2] * y[k2];
                            y[i2] = s / cap[i2 * kD + i2];
                        }
                        for (int i2 = kD - 1; i2 >= 0; --i2) {
                            double s = y[i2];
                            for (int k2 = i2 + 1; k2 < kD; ++k2)
                                s -= cap[k2 * kD + i2] * y[k2];
                            y[i2] = s / cap[i2 * kD + i2];
                        }
                    }
                    for (int a = 0; a < kD; ++a)
                        for (int r = 0; r < w.n_red; ++r)
                            dir[r] -= binv_u[a][r] * y[a];
                }
                solved = true;
            }
            if (!solved) { stalled = true; break; } // conditioning exhausted

            double lambda2 = 0.0;
            for (int r = 0; r < w.n_red; ++r) lambda2 += -g[r] * dir[r];
            decrement = std::sqrt(std::max(0.0, lambda2));
            ++total_newton;
            if (lambda2 <= stage_tol2) break;

            // Backtracking line search: stay in the domain, then Armijo.
            double phi0 = 0.0;
            {
                double obj = 0.0;
                for (int r = 0; r < w.n_red; ++r)
                    obj += p.objective[w.full_of_red[r]] * x[r];
                phi0 = -obj + mu * w.barrier_value();
            }
            double slope = -lambda2; // directional derivative of phi
            // Damped step outside the quadratic region: the natural step for
            // a barrier is 1/(1 + lambda) in the mu-scaled metric.
            double lambda_t = std::sqrt(lambda2 / mu);
            double alpha = lambda_t <= 0.30 ? 1.0 : 1.0 / (1.0 + lambda_t);
            bool stepped = false;
            for (int ls = 0; ls < 60; ++ls) {
                for (int r = 0; r < w.n_red; ++r) xtrial[r] = x[r] + alpha * dir[r];
                w.load(xtrial);
                double obj = 0.0;
                for (int r = 0; r < w.n_red; ++r)
                    obj += p.objective[w.full_of_red[r]] * xtrial[r];
                double phi = -obj + mu * w.barrier_value();
                if (std::isfinite(phi) && phi <= phi0 + 0.25 * alpha * slope) {
                    x = xtrial;
                    stepped = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!stepped) {
                w.load(x); // restore
                break;     // cannot improve further at this stage
            }
        }
        if (failed || stalled) break;
        if (opts.trace) {
            char buf[160];
            w.load(x);
            double obj = 0.0;
            for (int r = 0; r < w.n_red; ++r)
                obj += p.objective[w.full_of_red[r]] * x[r];
            std::snprintf(buf, sizeof buf,
                          "stage=%d mu=%.3e newton=%d objective=%.12g decrement=%.3e\n",
                          stage, mu, it, obj, decrement);
            *opts.trace << buf;
        }
        if (final_stage) break;
        mu *= opts.barrier_reduction;
        ++stage;
        if (stage > 200) break; // unreachable with sane options
    }

    w.load(x);
    rep.point = w.x_full;
    rep.objective = objective_full();
    rep.barrier_iterations = total_newton;
    rep.stationarity_residual = decrement;
    rep.max_constraint_violation = check_feasibility(p, rep.point).max_violation;

    if (failed) {
        rep.status = Status::numerical_failure;
    } else if (decrement <= opts.kkt_tol &&
               rep.max_constraint_violation <= opts.feas_tol) {
        rep.status = Status::optimal;
    } else {
        rep.status = Status::max_iter;
    }
    return rep;
}

} // namespace east::solver
