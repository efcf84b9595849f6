#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "plhom/ode.hpp"
#include "plhom/weight.hpp"

namespace plhom::test {

/// Beta-function closed form for pi_p, independent of the quadrature route.
inline double pi_p_beta_oracle(double p) {
  const double pi = 3.14159265358979323846;
  return 2.0 * pi * std::pow(p - 1.0, 1.0 / p) / (p * std::sin(pi / p));
}

/// Reference solution of -(|v'|^{p-2}v')' = |v|^{p-2}v, v(0)=0, v'(0)=1 by
/// direct integration of the flux form (independent of the table route).
/// Returns the trace of (v, m) with m = |v'|^{p-2}v'.
inline std::vector<OdeStep> sinp_ivp_oracle(double p, double x_end,
                                            double rtol = 1e-12) {
  const double q = 1.0 / (p - 1.0);
  auto odd = [](double z, double e) {
    return z == 0.0 ? 0.0 : (z > 0 ? std::pow(z, e) : -std::pow(-z, e));
  };
  OdeOptions opt;
  opt.rtol = rtol;
  opt.atol = rtol * 1e-2;
  opt.hmax = 0.01;
  return integrate_dopri5(
      [&](double, const State2& y) -> State2 {
        return {odd(y[1], q), -odd(y[0], p - 1.0)};
      },
      {0.0, 1.0}, 0.0, x_end, opt);
}

inline PeriodicWeight two_plus_sin() { return build_weight({"two-plus-sin", {}}); }
inline PeriodicWeight two_minus_sin() { return build_weight({"two-minus-sin", {}}); }
inline PeriodicWeight inv_two_plus_sin() { return build_weight({"inv-two-plus-sin", {}}); }
inline PeriodicWeight piecewise_weight(double a, double b) {
  return build_weight({"piecewise", {a, b}});
}

/// Random piecewise-linear test function with v(0) = v(1) = 0; returns knots,
/// values, and one-sided slopes usable as derivative samples.
struct PiecewiseLinear {
  std::vector<double> xs, vs, slopes;  // slopes[i] on [xs[i], xs[i+1])
  double l1_of_derivative = 0.0;
};

inline PiecewiseLinear random_pwl(std::mt19937& rng, int min_knots = 3,
                                  int max_knots = 10) {
  std::uniform_int_distribution<int> nk(min_knots, max_knots);
  std::uniform_real_distribution<double> U(0.0, 1.0), V(-1.0, 1.0);
  PiecewiseLinear f;
  const int n = nk(rng);
  f.xs.push_back(0.0);
  for (int i = 0; i < n; ++i) f.xs.push_back(U(rng));
  f.xs.push_back(1.0);
  std::sort(f.xs.begin(), f.xs.end());
  // drop coincident knots
  std::vector<double> xs;
  for (double x : f.xs)
    if (xs.empty() || x - xs.back() > 1e-6) xs.push_back(x);
  if (xs.back() != 1.0) xs.push_back(1.0);
  f.xs = xs;
  f.vs.assign(f.xs.size(), 0.0);
  for (size_t i = 1; i + 1 < f.xs.size(); ++i) f.vs[i] = V(rng);
  for (size_t i = 0; i + 1 < f.xs.size(); ++i) {
    const double s = (f.vs[i + 1] - f.vs[i]) / (f.xs[i + 1] - f.xs[i]);
    f.slopes.push_back(s);
    f.l1_of_derivative += std::abs(s) * (f.xs[i + 1] - f.xs[i]);
  }
  return f;
}

/// Panel edges aligned with the scaled weight periods over [0, span]; keeps
/// adaptive quadrature honest when eps is small.
inline std::vector<double> oscillation_splits(const PeriodicWeight& w, double eps,
                                              double span) {
  std::vector<double> out;
  const long periods = static_cast<long>(span / eps) + 1;
  for (long m = 0; m <= periods; ++m) {
    out.push_back(eps * m);
    for (double b : w.breakpoints()) out.push_back(eps * (m + b));
  }
  return out;
}

}  // namespace plhom::test
