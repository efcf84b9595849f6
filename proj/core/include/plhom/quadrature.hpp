#pragma once

#include <functional>
#include <vector>

namespace plhom::quad {

/// Globally adaptive Gauss-Kronrod (G7,K15) integration of f over [a, b].
/// Subdivides the worst interval until the summed error estimate drops below
/// max(abs_tol, rel_tol*|I|). Kinks inside the range are handled by the
/// subdivision; known non-smooth points should be passed as split points.
double gk_adaptive(const std::function<double(double)>& f, double a, double b,
                   double abs_tol = 1e-12, double rel_tol = 0.0,
                   const std::vector<double>* split_points = nullptr);

/// tanh-sinh quadrature of f over (0, 1) for integrands with integrable
/// endpoint singularities. f receives (t, 1-t); the second argument stays
/// accurate down to ~1e-300 so singular factors at t=1 lose no precision.
double tanh_sinh(const std::function<double(double, double)>& f,
                 double rel_tol = 1e-13);

}  // namespace plhom::quad
