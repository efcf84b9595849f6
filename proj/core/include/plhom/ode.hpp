#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "plhom/errors.hpp"

namespace plhom {

using State2 = std::array<double, 2>;

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-11;
  double hmax = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 20'000'000;
};

/// One accepted step: abscissa, state, and the RHS there (for dense Hermite
/// interpolation between trace points).
struct OdeStep {
  double x;
  State2 y;
  State2 f;
};

/// Adaptive Dormand-Prince 5(4) over [x0, x1] for a two-component system.
/// `splits` lists interior points where the RHS is discontinuous; integration
/// restarts there so each smooth piece is handled on its own. Throws
/// SolverError on step-size underflow or a non-finite state.
template <class Rhs>
std::vector<OdeStep> integrate_dopri5(Rhs&& rhs, State2 y0, double x0, double x1,
                                      const OdeOptions& opt,
                                      const std::vector<double>* splits = nullptr) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double span = x1 - x0;
  if (!(span > 0.0)) throw SolverError("integrate: empty interval");

  std::vector<double> edges{x0};
  if (splits) {
    for (double s : *splits)
      if (s > x0 + 1e-15 * span && s < x1 - 1e-15 * span) edges.push_back(s);
  }
  edges.push_back(x1);
  std::sort(edges.begin(), edges.end());

  std::vector<OdeStep> trace;
  trace.reserve(256);
  State2 y = y0;
  std::size_t steps = 0;

  for (size_t seg = 0; seg + 1 < edges.size(); ++seg) {
    double x = edges[seg];
    const double xe = edges[seg + 1];
    if (xe <= x) continue;
    State2 k1 = rhs(x, y);
    if (seg == 0) trace.push_back({x, y, k1});
    double h = std::min({opt.hmax, (xe - x), span / 100.0});

    while (x < xe) {
      if (++steps > opt.max_steps) throw SolverError("integrate: step budget exhausted");
      if (xe - x <= 1e-14 * span) {  // rounding sliver; state change is below tolerance
        x = xe;
        trace.back().x = xe;
        break;
      }
      const bool last = h >= xe - x;
      if (last) h = xe - x;
      if (!last && h < 1e-14 * span)
        throw SolverError("integrate: step size underflow (stiff or non-smooth data)");

      auto stage = [&](double c, const State2& dy) -> State2 {
        return rhs(x + c * h, {y[0] + h * dy[0], y[1] + h * dy[1]});
      };
      const State2 k2 = stage(0.2, {a21 * k1[0], a21 * k1[1]});
      const State2 k3 = stage(0.3, {a31 * k1[0] + a32 * k2[0], a31 * k1[1] + a32 * k2[1]});
      const State2 k4 = stage(0.8, {a41 * k1[0] + a42 * k2[0] + a43 * k3[0],
                                    a41 * k1[1] + a42 * k2[1] + a43 * k3[1]});
      const State2 k5 = stage(8.0 / 9,
                              {a51 * k1[0] + a52 * k2[0] + a53 * k3[0] + a54 * k4[0],
                               a51 * k1[1] + a52 * k2[1] + a53 * k3[1] + a54 * k4[1]});
      const State2 k6 = stage(1.0, {a61 * k1[0] + a62 * k2[0] + a63 * k3[0] +
                                        a64 * k4[0] + a65 * k5[0],
                                    a61 * k1[1] + a62 * k2[1] + a63 * k3[1] +
                                        a64 * k4[1] + a65 * k5[1]});
      State2 ynew;
      for (int i = 0; i < 2; ++i)
        ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                              b6 * k6[i]);
      const State2 k7 = rhs(x + h, ynew);

      double errnorm = 0.0;
      for (int i = 0; i < 2; ++i) {
        const double err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                e6 * k6[i] + e7 * k7[i]);
        const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        errnorm += (err / sc) * (err / sc);
      }
      errnorm = std::sqrt(0.5 * errnorm);
      if (!std::isfinite(errnorm) || !std::isfinite(ynew[0]) || !std::isfinite(ynew[1])) {
        if (h < 2e-14 * span) throw SolverError("integrate: non-finite state");
        h *= 0.25;
        continue;
      }

      if (errnorm <= 1.0) {
        x = last ? xe : x + h;
        y = ynew;
        k1 = k7;  // FSAL
        trace.push_back({x, y, k1});
        const double factor = errnorm == 0.0 ? 10.0 : 0.9 * std::pow(errnorm, -0.2);
        h = std::min(opt.hmax, h * std::clamp(factor, 0.2, 10.0));
      } else {
        h *= std::max(0.2, 0.9 * std::pow(errnorm, -0.2));
      }
    }
    if (seg + 2 < edges.size()) {
      // restart the FSAL derivative on the other side of the discontinuity
      k1 = rhs(x, y);
      trace.back().f = k1;
    }
  }
  return trace;
}

/// Cubic Hermite interpolation of component `comp` between two trace points.
inline double hermite_eval(const OdeStep& a, const OdeStep& b, int comp, double x) {
  const double h = b.x - a.x;
  const double t = (x - a.x) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * a.y[comp] + (t3 - 2 * t2 + t) * h * a.f[comp] +
         (-2 * t3 + 3 * t2) * b.y[comp] + (t3 - t2) * h * b.f[comp];
}

}  // namespace plhom
