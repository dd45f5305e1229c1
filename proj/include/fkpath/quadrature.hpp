#pragma once

#include <functional>

namespace fkpath {

// Adaptive Simpson integration of a smooth integrand over [a, b] to an
// absolute tolerance. Throws NumericError when the recursion depth runs out
// before the tolerance is met.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 48);

}  // namespace fkpath
