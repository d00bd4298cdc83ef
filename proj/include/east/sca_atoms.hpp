#pragma once

namespace east::sca {

/// A0(x; k) = 1/2 ln(kx (2 + kx)), the log of the dispersion-root numerator
/// times (1 + kx); concave in x for x, k > 0.
double a0(double x, double k);

/// A1(x; k) = (kx + 1) / (x (kx + 2)) = d/dx A0(x; k).
double a1(double x, double k);

/// First-order Taylor lower bound of f(x, y) = 1/(xy) at (x0, y0),
/// f_lb = -(x y0 + x0 y - 3 x0 y0) / (x0^2 y0^2) <= 1/(xy) for all x, y > 0.
double f_lb(double x, double y, double x0, double y0);

enum class ConcaveFn {
    half_log_kx_2kx, // A0(x; k)
    sqrt_x,          // sqrt(x); k unused
    log1p_kx,        // ln(1 + kx)
};

struct Tangent {
    double slope = 0.0;
    double intercept = 0.0;
    double at(double x) const { return slope * x + intercept; }
};

/// Tangent line of a concave template function at x0; dominates the function
/// globally on its domain and touches it at x0.
Tangent tangent_of_concave(ConcaveFn f, double x0, double k = 1.0);

} // namespace east::sca
