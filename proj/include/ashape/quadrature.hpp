#pragma once

#include <functional>

#include "ashape/errors.hpp"

namespace ashape::sf {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int levels = 0;
};

// Integral of f over (0, inf) by the double-exponential (tanh-exp) rule
// z = exp((pi/2) sinh u), with level doubling until two successive trapezoid
// refinements agree to abs_tol.  Handles integrable endpoint singularities
// like z^{-1/2} and exponential tails.  Throws ConvergenceError if max_level
// refinements are not enough.
QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         double abs_tol = 1e-12, int max_level = 14);

}  // namespace ashape::sf
