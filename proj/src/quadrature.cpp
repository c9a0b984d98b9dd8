#include "ashape/quadrature.hpp"

#include <cmath>
#include <string>

namespace ashape::sf {

namespace {

// weighted integrand at parameter u: f(z(u)) z'(u), zero once z overflows
// or the term has decayed to nothing
double node(const std::function<double(double)>& f, double u) {
    const double s = 0.5 * M_PI * std::sinh(u);
    if (s > 690.0) return 0.0;  // z beyond 1e299, integrand must have died
    const double z = std::exp(s);
    if (z == 0.0) return 0.0;
    const double v = f(z);
    if (v == 0.0) return 0.0;
    if (!std::isfinite(v))
        throw ConvergenceError("integrate_semi_infinite: integrand not finite at z = " +
                               std::to_string(z));
    const double w = 0.5 * M_PI * std::cosh(u) * z;
    return v * w;
}

// sum of nodes at u = u0 + m*step for m = 0,1,2,... until the tail is dead
double half_row(const std::function<double(double)>& f, double u0, double step) {
    double acc = 0.0;
    int dead = 0;
    for (int m = 0; m < 100000; ++m) {
        const double term = node(f, u0 + m * step);
        acc += term;
        if (std::abs(term) <= 1e-300 + 1e-17 * std::abs(acc)) {
            if (++dead >= 4) break;
        } else {
            dead = 0;
        }
    }
    return acc;
}

}  // namespace

QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         double abs_tol, int max_level) {
    double h = 1.0;
    double t_prev = h * (node(f, 0.0) + half_row(f, h, h) + half_row(f, -h, -h));
    QuadratureResult res;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        // new nodes sit at odd multiples of the halved step
        const double fresh = half_row(f, h, 2.0 * h) + half_row(f, -h, -2.0 * h);
        const double t = 0.5 * t_prev + h * fresh;
        res.error_estimate = std::abs(t - t_prev);
        res.value = t;
        res.levels = level;
        if (!std::isfinite(t))
            throw ConvergenceError("integrate_semi_infinite: integrand not integrable");
        if (level >= 3 && res.error_estimate <= abs_tol * std::max(1.0, std::abs(t)))
            return res;
        t_prev = t;
    }
    throw ConvergenceError("integrate_semi_infinite: no convergence after " +
                           std::to_string(max_level) + " refinements, residual " +
                           std::to_string(res.error_estimate));
}

}  // namespace ashape::sf
