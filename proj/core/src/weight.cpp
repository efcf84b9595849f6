#include "plhom/weight.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plhom/quadrature.hpp"

namespace plhom {
namespace {

constexpr double kTwoPi = 6.28318530717958647692;

double frac(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;  // x just below an integer can round up
  return f;
}

// min/max of f over one period: dense scan then ternary refinement of the
// winning cell (presets are piecewise monotone at this resolution).
std::pair<double, double> scan_range(const std::function<double(double)>& f,
                                     const std::vector<double>& breakpoints) {
  const int n = 8192;
  double lo = f(0.0), hi = lo;
  double lo_x = 0.0, hi_x = 0.0;
  auto consider = [&](double x) {
    const double v = f(x);
    if (v < lo) { lo = v; lo_x = x; }
    if (v > hi) { hi = v; hi_x = x; }
  };
  for (int i = 1; i < n; ++i) consider(static_cast<double>(i) / n);
  for (double b : breakpoints) {
    consider(std::max(0.0, b - 1e-12));
    consider(std::min(1.0, b + 1e-12));
  }
  auto refine = [&](double x0, bool minimize) {
    double a = x0 - 1.0 / n, b = x0 + 1.0 / n;
    for (int it = 0; it < 200; ++it) {
      const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
      const double f1 = f(frac(m1)), f2 = f(frac(m2));
      if ((f1 < f2) == minimize)
        b = m2;
      else
        a = m1;
    }
    return f(frac(0.5 * (a + b)));
  };
  lo = std::min(lo, refine(lo_x, true));
  hi = std::max(hi, refine(hi_x, false));
  return {lo, hi};
}

double hermite(double t, double h, double y0, double d0, double y1, double d1) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 +
         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

double hermite_deriv(double t, double h, double y0, double d0, double y1, double d1) {
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * h * d0 +
          (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * h * d1) / h;
}

}  // namespace

PeriodicWeight PeriodicWeight::from_callable(std::string name, std::vector<double> params,
                                             std::function<double(double)> f,
                                             std::function<double(double)> derivative,
                                             std::vector<double> breakpoints,
                                             Smoothness smoothness) {
  PeriodicWeight w;
  w.name_ = std::move(name);
  w.params_ = std::move(params);
  w.f_ = std::move(f);
  w.df_ = std::move(derivative);
  w.breakpoints_ = std::move(breakpoints);
  std::sort(w.breakpoints_.begin(), w.breakpoints_.end());
  w.smoothness_ = smoothness;

  auto [lo, hi] = scan_range(w.f_, w.breakpoints_);
  w.lower_ = lo;
  w.upper_ = hi;
  if (!(lo > 0.0))
    throw std::invalid_argument("weight '" + w.name_ + "' is not strictly positive");

  w.mean_ = quad::gk_adaptive(w.f_, 0.0, 1.0, 1e-11, 0.0, &w.breakpoints_);
  const double mean = w.mean_;
  auto dev = [&w, mean](double x) { return std::abs(w.f_(x) - mean); };
  w.l1_dev_ = quad::gk_adaptive(dev, 0.0, 1.0, 1e-11, 0.0, &w.breakpoints_);
  auto [dlo, dhi] = scan_range(dev, w.breakpoints_);
  (void)dlo;
  w.sup_dev_ = dhi < 1e-13 * std::abs(mean) ? 0.0 : dhi;
  if (w.sup_dev_ == 0.0) w.l1_dev_ = 0.0;
  return w;
}

double PeriodicWeight::eval(double x) const { return f_(frac(x)); }

double PeriodicWeight::eval_scaled(double eps, double x) const {
  if (!(eps > 0.0)) throw std::invalid_argument("eval_scaled: eps must be positive");
  return f_(frac(x / eps));
}

double PeriodicWeight::eval_avg(double x) const {
  const double t = frac(x);
  for (double b : breakpoints_) {
    if (std::abs(t - b) < 1e-12 || std::abs(t - b + 1.0) < 1e-12 ||
        std::abs(t - b - 1.0) < 1e-12)
      return 0.5 * (f_(frac(b - 1e-9)) + f_(frac(b + 1e-9)));
  }
  if (t < 1e-12 || t > 1.0 - 1e-12)
    return 0.5 * (f_(frac(-1e-9)) + f_(1e-9));
  return f_(t);
}

double PeriodicWeight::deriv(double x) const {
  if (!df_) throw std::logic_error("weight '" + name_ + "' has no derivative");
  return df_(frac(x));
}

double PeriodicWeight::deriv_scaled(double eps, double x) const {
  return deriv(x / eps) / eps;
}

double PeriodicWeight::antiderivative_R(double x) const {
  const double t = frac(x);
  if (t == 0.0) return 0.0;
  const double mean = mean_;
  auto g = [this, mean](double u) { return f_(u) - mean; };
  return quad::gk_adaptive(g, 0.0, t, 1e-12, 0.0, &breakpoints_);
}

PeriodicWeight constant_weight(double c) {
  return build_weight({"constant", {c}});
}

PeriodicWeight build_weight(const WeightPreset& preset) {
  const auto& n = preset.name;
  const auto& pr = preset.params;
  if (n == "constant") {
    if (pr.size() != 1)
      throw std::invalid_argument("weight.params: constant takes 1 parameter");
    const double c = pr[0];
    return PeriodicWeight::from_callable(
        n, pr, [c](double) { return c; }, [](double) { return 0.0; }, {},
        Smoothness::smooth);
  }
  if (n == "two-plus-sin") {
    return PeriodicWeight::from_callable(
        n, pr, [](double x) { return 2.0 + std::sin(kTwoPi * x); },
        [](double x) { return kTwoPi * std::cos(kTwoPi * x); }, {}, Smoothness::smooth);
  }
  if (n == "two-minus-sin") {
    return PeriodicWeight::from_callable(
        n, pr, [](double x) { return 2.0 - std::sin(kTwoPi * x); },
        [](double x) { return -kTwoPi * std::cos(kTwoPi * x); }, {}, Smoothness::smooth);
  }
  if (n == "inv-two-plus-sin") {
    auto f = [](double x) { return 1.0 / (2.0 + std::sin(kTwoPi * x)); };
    auto df = [](double x) {
      const double d = 2.0 + std::sin(kTwoPi * x);
      return -kTwoPi * std::cos(kTwoPi * x) / (d * d);
    };
    return PeriodicWeight::from_callable(n, pr, f, df, {}, Smoothness::smooth);
  }
  if (n == "piecewise") {
    if (pr.size() != 2)
      throw std::invalid_argument("weight.params: piecewise takes 2 parameters");
    const double a = pr[0], b = pr[1];
    return PeriodicWeight::from_callable(
        n, pr, [a, b](double x) { return x < 0.5 ? a : b; }, nullptr, {0.5},
        Smoothness::piecewise);
  }
  throw std::invalid_argument("unknown weight preset '" + n + "'");
}

std::pair<double, double> oscillation_bound_check(
    const PeriodicWeight& w, double eps, const std::vector<double>& xs,
    const std::vector<double>& vs, const std::vector<double>& dvs, double p) {
  if (xs.size() < 2 || xs.size() != vs.size() || xs.size() != dvs.size())
    throw std::invalid_argument("oscillation_bound_check: inconsistent samples");
  if (!(eps > 0.0)) throw std::invalid_argument("oscillation_bound_check: eps must be positive");
  double scale = 0.0;
  for (double v : vs) scale = std::max(scale, std::abs(v));
  if (std::abs(vs.front()) > 1e-9 * std::max(1.0, scale) ||
      std::abs(vs.back()) > 1e-9 * std::max(1.0, scale))
    throw std::invalid_argument("oscillation_bound_check: v must vanish at 0 and 1");

  const double mean = w.mean();
  // the oscillating factor needs panels aligned with the scaled periods (and
  // any weight breakpoints inside them), or the adaptive rule drowns
  std::vector<double> osc_splits;
  {
    const double span = xs.back() - xs.front();
    const long periods = static_cast<long>(std::ceil(span / eps)) + 1;
    if (periods < 2000000) {
      for (long m = 0; m <= periods; ++m) {
        osc_splits.push_back(eps * m);
        for (double b : w.breakpoints()) osc_splits.push_back(eps * (m + b));
      }
    }
  }
  double lhs = 0.0, norm_p = 0.0, norm_dp = 0.0;
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    const double h = xs[i + 1] - xs[i];
    if (!(h > 0.0)) throw std::invalid_argument("oscillation_bound_check: xs must increase");
    auto vh = [&](double x) {
      return hermite((x - xs[i]) / h, h, vs[i], dvs[i], vs[i + 1], dvs[i + 1]);
    };
    auto dvh = [&](double x) {
      return hermite_deriv((x - xs[i]) / h, h, vs[i], dvs[i], vs[i + 1], dvs[i + 1]);
    };
    lhs += quad::gk_adaptive(
        [&](double x) { return (w.eval_scaled(eps, x) - mean) * std::pow(std::abs(vh(x)), p); },
        xs[i], xs[i + 1], 1e-12, 0.0, &osc_splits);
    norm_p += quad::gk_adaptive(
        [&](double x) { return std::pow(std::abs(vh(x)), p); }, xs[i], xs[i + 1], 1e-13);
    norm_dp += quad::gk_adaptive(
        [&](double x) { return std::pow(std::abs(dvh(x)), p); }, xs[i], xs[i + 1], 1e-13);
  }
  const double up = std::pow(norm_p, 1.0 / p);
  const double dup = std::pow(norm_dp, 1.0 / p);
  const double rhs =
      0.5 * p * eps * w.l1_deviation() * std::pow(up, p - 1.0) * dup;
  return {std::abs(lhs), rhs};
}

}  // namespace plhom
