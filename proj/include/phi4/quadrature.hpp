#pragma once

#include <functional>

namespace phi4::quad {

// Adaptive Gauss-Kronrod integral of f over [a,b], relative tolerance rtol.
// Throws QuadratureNotConverged if GSL cannot reach the tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rtol = 1e-10);

}  // namespace phi4::quad
