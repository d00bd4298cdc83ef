#include "east/sca_atoms.hpp"

#include <cmath>
#include <stdexcept>

namespace east::sca {

double a0(double x, double k) {
    if (!(x > 0.0 && k > 0.0)) throw std::domain_error("a0: x and k must be > 0");
    return 0.5 * std::log(k * x * (2.0 + k * x));
}

double a1(double x, double k) {
    if (!(x > 0.0 && k > 0.0)) throw std::domain_error("a1: x and k must be > 0");
    return (k * x + 1.0) / (x * (k * x + 2.0));
}

double f_lb(double x, double y, double x0, double y0) {
    if (!(x > 0.0 && y > 0.0 && x0 > 0.0 && y0 > 0.0))
        throw std::domain_error("f_lb: all arguments must be > 0");
    return -(x * y0 + x0 * y - 3.0 * x0 * y0) / (x0 * x0 * y0 * y0);
}

Tangent tangent_of_concave(ConcaveFn f, double x0, double k) {
    switch (f) {
    case ConcaveFn::half_log_kx_2kx: {
        double slope = a1(x0, k);
        return {slope, a0(x0, k) - slope * x0};
    }
    case ConcaveFn::sqrt_x: {
        if (!(x0 > 0.0)) throw std::domain_error("tangent: sqrt needs x0 > 0");
        double r = std::sqrt(x0);
        double slope = 0.5 / r;
        return {slope, r - slope * x0};
    }
    case ConcaveFn::log1p_kx: {
        if (!(x0 >= 0.0 && k >= 0.0))
            throw std::domain_error("tangent: log1p_kx needs x0, k >= 0");
        double slope = k / (1.0 + k * x0);
        return {slope, std::log1p(k * x0) - slope * x0};
    }
    }
    throw std::domain_error("tangent: unknown function id");
}

} // namespace east::sca
