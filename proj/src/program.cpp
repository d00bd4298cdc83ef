#include "east/program.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace east::sca {

namespace {
constexpr double kDomainBreach = 1e300;

double log_sum(const std::vector<LogTerm>& logs, std::span<const double> x,
               bool& ok) {
    double s = 0.0;
    for (const auto& t : logs) {
        double g = t.arg.eval(x);
        if (!(g > 0.0)) {
            ok = false;
            return 0.0;
        }
        s += t.coef * std::log(g);
    }
    return s;
}
} // namespace

double atom_violation(const ConstraintAtom& atom, std::span<const double> x) {
    return std::visit(
        [&](const auto& a) -> double {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, AffineAtom>) {
                double v = a.expr.eval(x);
                switch (a.rel) {
                case Rel::le: return v;
                case Rel::ge: return -v;
                case Rel::eq: return std::abs(v);
                }
                return kDomainBreach;
            } else if constexpr (std::is_same_v<T, LogAffineAtom>) {
                bool ok = true;
                double v = log_sum(a.logs, x, ok) + a.tail.eval(x);
                return ok ? -v : kDomainBreach;
            } else if constexpr (std::is_same_v<T, LogRatioAtom>) {
                double u = x[a.u.index];
                if (!(u > 0.0)) return kDomainBreach;
                bool ok = true;
                double v = std::log(u) - std::log1p(u) + log_sum(a.logs, x, ok) +
                           a.tail.eval(x);
                return ok ? -v : kDomainBreach;
            } else if constexpr (std::is_same_v<T, QuadOverAffineAtom>) {
                double f1 = a.f1.eval(x), f2 = a.f2.eval(x);
                if (!(f1 > 0.0) || !(f2 > 0.0)) return kDomainBreach;
                double q = 0.0;
                for (const auto& r : a.rows) {
                    double v = r.eval(x);
                    q += v * v;
                }
                return q - f1 * f2;
            } else {
                static_assert(std::is_same_v<T, NormAffineAtom>);
                double q = 0.0;
                for (const auto& r : a.rows) {
                    double v = r.eval(x);
                    q += v * v;
                }
                return std::sqrt(q) - a.rhs.eval(x);
            }
        },
        atom);
}

namespace {
void print_affine(std::ostringstream& out, const AffineExpr& e,
                  const std::vector<std::string>& tags) {
    bool first = true;
    for (auto [i, c] : e.terms) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", c);
        out << (first ? "" : " + ") << buf << "*" << tags[i];
        first = false;
    }
    if (e.constant != 0.0 || first) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", e.constant);
        out << (first ? "" : " + ") << buf;
    }
}

void print_logs(std::ostringstream& out, const std::vector<LogTerm>& logs,
                const std::vector<std::string>& tags) {
    for (const auto& t : logs) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", t.coef);
        out << " + " << buf << "*ln(";
        print_affine(out, t.arg, tags);
        out << ")";
    }
}
} // namespace

std::string dump(const ConvexProgram& p) {
    std::ostringstream out;
    out << "vars " << p.num_vars() << "\n";
    for (int i = 0; i < p.num_vars(); ++i) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "  %s in [%g, %g] obj %g ws %g\n",
                      p.tags[i].c_str(), p.lower[i], p.upper[i], p.objective[i],
                      p.warm_start[i]);
        out << buf;
    }
    out << "atoms " << p.atoms.size() << "\n";
    for (const auto& atom : p.atoms) {
        std::visit(
            [&](const auto& a) {
                using T = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<T, AffineAtom>) {
                    out << "  affine: ";
                    print_affine(out, a.expr, p.tags);
                    out << (a.rel == Rel::le ? " <= 0" : a.rel == Rel::ge ? " >= 0" : " == 0");
                } else if constexpr (std::is_same_v<T, LogAffineAtom>) {
                    out << "  log_affine:";
                    print_logs(out, a.logs, p.tags);
                    out << " + [";
                    print_affine(out, a.tail, p.tags);
                    out << "] >= 0";
                } else if constexpr (std::is_same_v<T, LogRatioAtom>) {
                    out << "  log_ratio: ln(" << p.tags[a.u.index] << "/(1+"
                        << p.tags[a.u.index] << "))";
                    print_logs(out, a.logs, p.tags);
                    out << " + [";
                    print_affine(out, a.tail, p.tags);
                    out << "] >= 0";
                } else if constexpr (std::is_same_v<T, QuadOverAffineAtom>) {
                    out << "  quad_over_affine: ||";
                    for (size_t i = 0; i < a.rows.size(); ++i) {
                        if (i) out << "; ";
                        print_affine(out, a.rows[i], p.tags);
                    }
                    out << "||^2 <= (";
                    print_affine(out, a.f1, p.tags);
                    out << ")*(";
                    print_affine(out, a.f2, p.tags);
                    out << ")";
                } else {
                    static_assert(std::is_same_v<T, NormAffineAtom>);
                    out << "  norm_affine: ||";
                    for (size_t i = 0; i < a.rows.size(); ++i) {
                        if (i) out << "; ";
                        print_affine(out, a.rows[i], p.tags);
                    }
                    out << "|| <= ";
                    print_affine(out, a.rhs, p.tags);
                }
                out << "\n";
            },
            atom);
    }
    return out.str();
}

} // namespace east::sca
