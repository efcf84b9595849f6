#include "plhom/prufer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plhom/homog.hpp"

namespace plhom {
namespace {

constexpr int kMaxBisect = 200;

double odd_pow(double z, double q) {
  if (z == 0.0) return 0.0;
  return z > 0.0 ? std::pow(z, q) : -std::pow(-z, q);
}

void validate_inputs(const ProblemSpec& spec, int k, double tol) {
  if (k < 1) throw std::invalid_argument("solve_eigen: k must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_eigen: tol must be positive");
  if (spec.eps < ProblemSpec::kMinEps)
    throw std::domain_error("solve_eigen: eps below 1e-4 is outside the supported range");
}

double constant_coefficient_value(const ProblemSpec& spec) {
  if (!spec.constant_coefficient())
    throw std::invalid_argument("expected a constant coefficient at this point");
  return spec.coefficient.mean();
}

// Step-size cap: resolve the weight oscillation (period eps) and the solution
// oscillation (quarter wavelength at the fastest phase speed).
double step_cap(const ProblemSpec& spec, double lambda) {
  const double alpha = spec.coefficient.lower();
  const double r_max = spec.weight.upper() / alpha;
  double cap = 0.25 * spec.pi_p() / std::pow(lambda * r_max, 1.0 / spec.p());
  if (!spec.weight.is_constant() || !spec.coefficient.is_constant())
    cap = std::min(cap, spec.eps / 20.0);
  return std::min(cap, spec.length / 16.0);
}

// Discontinuity abscissae of the scaled data over (0, length).
std::vector<double> scaled_breakpoints(const ProblemSpec& spec) {
  std::vector<double> base;
  auto add_base = [&base](const PeriodicWeight& w) {
    if (w.smoothness() != Smoothness::piecewise) return;
    base.push_back(0.0);
    for (double b : w.breakpoints()) base.push_back(b);
  };
  add_base(spec.weight);
  add_base(spec.coefficient);
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  std::vector<double> out;
  if (base.empty()) return out;
  const long periods = static_cast<long>(std::ceil(spec.length / spec.eps)) + 1;
  if (periods * static_cast<long>(base.size()) > 400000)
    throw std::domain_error("integrate_direct: too many discontinuities to split");
  for (long m = 0; m <= periods; ++m)
    for (double b : base) {
      const double x = spec.eps * (m + b);
      if (x > 0.0 && x < spec.length) out.push_back(x);
    }
  std::sort(out.begin(), out.end());
  return out;
}

int count_sign_changes(const std::vector<OdeStep>& trace) {
  int n = 0;
  double prev = 0.0;
  for (size_t i = 1; i < trace.size(); ++i) {
    const double u = trace[i].y[0];
    if (u == 0.0) continue;
    if (prev != 0.0 && u * prev < 0.0) ++n;
    prev = u;
  }
  return n;
}

// max |u| over the sampled curve, with interior extrema recovered from the
// cubic Hermite model wherever the derivative changes sign between nodes;
// nodal maxima alone would bias the normalization by O(h^2)
double refined_peak(const std::vector<std::pair<double, double>>& fs,
                    const std::vector<double>& ds) {
  double best = 0.0;
  for (size_t i = 0; i < fs.size(); ++i) best = std::max(best, std::abs(fs[i].second));
  for (size_t i = 0; i + 1 < fs.size(); ++i) {
    if (!(ds[i] * ds[i + 1] < 0.0)) continue;
    const double h = fs[i + 1].first - fs[i].first;
    auto du = [&](double t) {
      const double t2 = t * t;
      return ((6 * t2 - 6 * t) * fs[i].second + (3 * t2 - 4 * t + 1) * h * ds[i] +
              (-6 * t2 + 6 * t) * fs[i + 1].second + (3 * t2 - 2 * t) * h * ds[i + 1]) / h;
    };
    double lo = 0.0, hi = 1.0;
    const bool rising = ds[i] > 0.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((du(mid) > 0.0) == rising)
        lo = mid;
      else
        hi = mid;
    }
    const double t = 0.5 * (lo + hi), t2 = t * t, t3 = t2 * t;
    const double u = (2 * t3 - 3 * t2 + 1) * fs[i].second +
                     (t3 - 2 * t2 + t) * h * ds[i] +
                     (-2 * t3 + 3 * t2) * fs[i + 1].second + (t3 - t2) * h * ds[i + 1];
    best = std::max(best, std::abs(u));
  }
  return best;
}

// Root of the cubic Hermite model of component `comp` minus `level` inside a
// bracketing trace interval.
double refine_crossing(const OdeStep& a, const OdeStep& b, int comp, double level) {
  double lo = a.x, hi = b.x;
  const double fa = a.y[comp] - level;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = hermite_eval(a, b, comp, mid) - level;
    if ((fm > 0.0) == (fa > 0.0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct BisectionOutcome {
  double lambda;
  int iterations;
};

// Plain bisection of a monotone predicate on an expandable bracket.
template <class Above>
BisectionOutcome bisect(double lo, double hi, double tol, Above&& above,
                        const char* what) {
  int expand = 0;
  while (above(lo)) {
    lo *= 0.5;
    if (++expand > 60) throw SolverError(std::string(what) + ": lower bracket failure");
  }
  expand = 0;
  while (!above(hi)) {
    hi *= 2.0;
    if (++expand > 60) throw SolverError(std::string(what) + ": upper bracket failure");
  }
  int it = 0;
  while (hi - lo > tol * 0.5 * (hi + lo) && it < kMaxBisect) {
    const double mid = 0.5 * (lo + hi);
    if (above(mid))
      hi = mid;
    else
      lo = mid;
    ++it;
  }
  return {0.5 * (lo + hi), it};
}

// the converged solve integrates once more with an 8x tighter step cap so the
// cubic Hermite resampling of zeros and samples stays well under tolerance
constexpr double kTraceRefine = 0.125;

// u and u' recovered from the phase variables:
//   u = (lambda r/(p-1))^{-1/p} amp s(phi),  u' = (p-1)^{1/p} amp s'(phi)
struct PhasePoint {
  double u, du;
};

PhasePoint phase_u(const ProblemSpec& spec, double lambda, double x, double phi,
                   double amp) {
  const double c = spec.coefficient.mean();
  const double p = spec.p();
  const double r = spec.weight.eval_scaled(spec.eps, x) / c;
  const auto core = spec.trig->core(phi);
  return {std::pow(lambda * r / (p - 1.0), -1.0 / p) * amp * core.s,
          std::pow(p - 1.0, 1.0 / p) * amp * core.ds};
}

// max |u| along a phase trace: trace nodes plus the points where the phase
// crosses a half-period level (s = +-1 there). The phase and amplitude are
// smooth, so their Hermite models are reliable where u itself is not.
double phase_peak(const ProblemSpec& spec, double lambda, int k,
                  const std::vector<OdeStep>& trace) {
  double best = 0.0;
  for (const auto& st : trace)
    best = std::max(best, std::abs(phase_u(spec, lambda, st.x, st.y[0], st.y[1]).u));
  const double pip = spec.pi_p();
  for (int j = 0; j < k; ++j) {
    const double level = (j + 0.5) * pip;
    for (size_t i = 0; i + 1 < trace.size(); ++i) {
      if (!((trace[i].y[0] - level) * (trace[i + 1].y[0] - level) <= 0.0)) continue;
      const double x = refine_crossing(trace[i], trace[i + 1], 0, level);
      const double amp = hermite_eval(trace[i], trace[i + 1], 1, x);
      best = std::max(best, std::abs(phase_u(spec, lambda, x, level, amp).u));
    }
  }
  return best;
}

EigenResult finish_from_phase(const ProblemSpec& spec, int k, double lambda,
                              int iterations, double rtol) {
  const PhaseIntegration fin = integrate_phase(spec, lambda, rtol, kTraceRefine);
  const double pip = spec.pi_p();

  EigenResult res;
  res.k = k;
  res.lambda = lambda;
  res.iterations = iterations;
  res.phase_at_end = fin.phi_end;
  res.residual = std::abs(fin.phi_end - k * pip);
  res.route = SolveRoute::phase_system;
  res.trace = fin.trace;

  size_t cursor = 0;
  for (int j = 1; j < k; ++j) {
    const double level = j * pip;
    while (cursor + 1 < fin.trace.size() &&
           !((fin.trace[cursor].y[0] - level) * (fin.trace[cursor + 1].y[0] - level) <= 0.0))
      ++cursor;
    if (cursor + 1 >= fin.trace.size())
      throw SolverError("solve_eigen: lost a phase crossing while extracting zeros");
    res.zeros.push_back(refine_crossing(fin.trace[cursor], fin.trace[cursor + 1], 0, level));
  }

  res.peak_scale = phase_peak(spec, lambda, k, fin.trace);
  res.function_samples.reserve(fin.trace.size());
  res.derivative_samples.reserve(fin.trace.size());
  for (const auto& st : fin.trace) {
    const auto v = phase_u(spec, lambda, st.x, st.y[0], st.y[1]);
    res.function_samples.emplace_back(st.x, v.u / res.peak_scale);
    res.derivative_samples.push_back(v.du / res.peak_scale);
  }
  return res;
}

EigenResult finish_from_direct(const ProblemSpec& spec, int k, double lambda,
                               int iterations, double rtol) {
  const DirectIntegration fin = integrate_direct(spec, lambda, rtol, kTraceRefine);

  EigenResult res;
  res.k = k;
  res.lambda = lambda;
  res.iterations = iterations;
  res.phase_at_end = std::numeric_limits<double>::quiet_NaN();

  res.route = SolveRoute::direct_system;
  res.trace = fin.trace;
  std::vector<std::pair<double, double>> raw;
  std::vector<double> raw_d;
  raw.reserve(fin.trace.size());
  raw_d.reserve(fin.trace.size());
  for (const auto& st : fin.trace) {
    raw.emplace_back(st.x, st.y[0]);
    raw_d.push_back(st.f[0]);
  }
  const double peak = refined_peak(raw, raw_d);
  res.peak_scale = peak;
  res.residual = std::abs(fin.u_end) / peak;

  const double endpoint_cut = spec.length * (1.0 - 1e-5);
  for (size_t i = 1; i < fin.trace.size(); ++i) {
    const double u0 = fin.trace[i - 1].y[0], u1 = fin.trace[i].y[0];
    if (i > 1 && u0 * u1 < 0.0) {
      const double z = refine_crossing(fin.trace[i - 1], fin.trace[i], 0, 0.0);
      if (z < endpoint_cut) res.zeros.push_back(z);
    }
  }
  if (static_cast<int>(res.zeros.size()) != k - 1)
    throw SolverError("solve_eigen: converged eigenfunction has " +
                      std::to_string(res.zeros.size()) + " interior zeros, expected " +
                      std::to_string(k - 1));

  res.function_samples.reserve(raw.size());
  res.derivative_samples.reserve(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    res.function_samples.emplace_back(raw[i].first, raw[i].second / peak);
    res.derivative_samples.push_back(raw_d[i] / peak);
  }
  return res;
}

EigenResult solve_weight_only(const ProblemSpec& spec, int k, double tol);

// Carries a solution of the transformed problem back to x coordinates. The
// mapped result resamples like a direct-system one: its trace holds the
// already normalized (u, u') samples.
EigenResult map_back(const ProblemSpec& spec, const TransformedProblem& t,
                     EigenResult inner) {
  EigenResult res = std::move(inner);
  res.lambda /= t.mu_scale;
  for (auto& z : res.zeros) z = t.x_from_z(z);
  const double q = 1.0 / (spec.p() - 1.0);
  res.trace.clear();
  res.trace.reserve(res.function_samples.size());
  for (size_t i = 0; i < res.function_samples.size(); ++i) {
    auto& [x, u] = res.function_samples[i];
    const double xx = t.x_from_z(x);
    const double dzdx = std::pow(spec.coefficient.eval_scaled(spec.eps, xx), -q) / t.L_eps;
    res.derivative_samples[i] *= dzdx;
    x = xx;
    res.trace.push_back({xx, {u, 0.0}, {res.derivative_samples[i], 0.0}});
  }
  res.route = SolveRoute::direct_system;
  res.peak_scale = 1.0;
  return res;
}

EigenResult solve_weight_only(const ProblemSpec& spec, int k, double tol) {
  const double c = constant_coefficient_value(spec);
  const double mu_k = std::pow(spec.pi_p() * k / spec.length, spec.p());
  const double lo0 = 0.98 * c * mu_k / spec.weight.upper();
  const double hi0 = 1.02 * weyl_upper_bound(spec.trig->exponent(), 1, k, spec.length,
                                             c, spec.weight.lower());

  if (spec.weight.smoothness() == Smoothness::smooth && spec.weight.has_derivative()) {
    const double target = k * spec.pi_p();
    auto above = [&spec, target](double lam) {
      return integrate_phase(spec, lam).phi_end >= target;
    };
    const auto out = bisect(lo0, hi0, tol, above, "solve_eigen(phase)");
    return finish_from_phase(spec, k, out.lambda, out.iterations, 1e-9);
  }

  auto above = [&spec, k](double lam) {
    return integrate_direct(spec, lam).interior_zero_count >= k;
  };
  const auto out = bisect(lo0, hi0, tol, above, "solve_eigen(count)");
  return finish_from_direct(spec, k, out.lambda, out.iterations, 1e-9);
}

}  // namespace

PhaseDerivative phase_rhs(const ProblemSpec& spec, double lambda, const PhaseState& state) {
  if (!(lambda > 0.0)) throw std::invalid_argument("phase_rhs: lambda must be positive");
  if (spec.weight.smoothness() != Smoothness::smooth || !spec.weight.has_derivative())
    throw std::invalid_argument(
        "phase_rhs: weight has no derivative; use integrate_direct for piecewise data");
  const double c = constant_coefficient_value(spec);
  const double p = spec.p();

  const double rho = spec.weight.eval_scaled(spec.eps, state.x);
  const double r = rho / c;
  const double log_deriv = spec.weight.deriv_scaled(spec.eps, state.x) / rho;  // r'/r

  const auto core = spec.trig->core(state.phi);
  const double tangent = (p - 1.0) * odd_pow(core.ds, p - 1.0) * core.s;

  PhaseDerivative d;
  d.dphi = std::pow(lambda * r, 1.0 / p) + log_deriv / p * tangent;
  d.damp = log_deriv / p * state.amp * std::pow(std::abs(core.s), p);
  return d;
}

PhaseIntegration integrate_phase(const ProblemSpec& spec, double lambda, double rtol,
                                 double hmax_factor) {
  if (!(lambda > 0.0)) throw std::invalid_argument("integrate_phase: lambda must be positive");
  OdeOptions opt;
  opt.rtol = rtol;
  opt.atol = rtol * 1e-2;
  opt.hmax = step_cap(spec, lambda) * hmax_factor;

  auto rhs = [&spec, lambda](double x, const State2& y) -> State2 {
    const PhaseDerivative d = phase_rhs(spec, lambda, {x, y[0], y[1]});
    return {d.dphi, d.damp};
  };
  PhaseIntegration out;
  out.trace = integrate_dopri5(rhs, {0.0, 1.0}, 0.0, spec.length, opt);
  out.phi_end = out.trace.back().y[0];
  out.amp_end = out.trace.back().y[1];
  return out;
}

DirectIntegration integrate_direct(const ProblemSpec& spec, double lambda, double rtol,
                                   double hmax_factor) {
  if (!(lambda > 0.0)) throw std::invalid_argument("integrate_direct: lambda must be positive");
  const double p = spec.p();
  const double q = spec.p_conj() - 1.0;  // 1/(p-1)

  OdeOptions opt;
  opt.rtol = rtol;
  opt.atol = rtol * 1e-2;
  opt.hmax = step_cap(spec, lambda) * hmax_factor;

  const std::vector<double> splits = scaled_breakpoints(spec);
  auto rhs = [&spec, lambda, p, q](double x, const State2& y) -> State2 {
    const double a = spec.coefficient.eval_scaled(spec.eps, x);
    const double rho = spec.weight.eval_scaled(spec.eps, x);
    return {odd_pow(y[1] / a, q), -lambda * rho * odd_pow(y[0], p - 1.0)};
  };
  DirectIntegration out;
  out.trace = integrate_dopri5(rhs, {0.0, 1.0}, 0.0, spec.length, opt,
                               splits.empty() ? nullptr : &splits);
  out.u_end = out.trace.back().y[0];
  out.w_end = out.trace.back().y[1];
  out.interior_zero_count = count_sign_changes(out.trace);
  return out;
}

EigenResult solve_eigen(const ProblemSpec& spec, int k, double tol, SolveMode mode,
                        std::optional<std::pair<double, double>> bracket) {
  validate_inputs(spec, k, tol);

  if (mode == SolveMode::endpoint) {
    if (!bracket)
      throw std::invalid_argument("solve_eigen: endpoint mode needs a bracket (lo, hi)");
    const bool direct_route = !spec.constant_coefficient() ||
                              spec.weight.smoothness() == Smoothness::piecewise;
    auto endpoint_value = [&](double lam) -> double {
      if (direct_route) return integrate_direct(spec, lam).u_end;
      const PhaseIntegration ph = integrate_phase(spec, lam);
      const double c = constant_coefficient_value(spec);
      const double r = spec.weight.eval_scaled(spec.eps, spec.length) / c;
      const double p = spec.p();
      return std::pow(p - 1.0, 1.0 / p) * std::pow(lam * r, -1.0 / p) * ph.amp_end *
             spec.trig->core(ph.phi_end).s;
    };
    double lo = bracket->first, hi = bracket->second;
    if (!(lo > 0.0 && hi > lo))
      throw std::invalid_argument("solve_eigen: invalid endpoint bracket");
    double flo = endpoint_value(lo);
    if (flo * endpoint_value(hi) > 0.0)
      throw SolverError("solve_eigen(endpoint): u(l) does not change sign over the bracket");
    int it = 0;
    while (hi - lo > tol * 0.5 * (hi + lo) && it < kMaxBisect) {
      const double mid = 0.5 * (lo + hi);
      const double fm = endpoint_value(mid);
      if ((fm > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
      ++it;
    }
    const double lambda = 0.5 * (lo + hi);
    EigenResult res = direct_route ? finish_from_direct(spec, k, lambda, it, 1e-9)
                                   : finish_from_phase(spec, k, lambda, it, 1e-9);
    if (static_cast<int>(res.zeros.size()) != k - 1 ||
        (!direct_route && res.residual > 0.5 * spec.pi_p()))
      throw SolverError("solve_eigen(endpoint): bracket does not isolate eigenvalue " +
                        std::to_string(k));
    return res;
  }

  if (!spec.constant_coefficient()) {
    const TransformedProblem t = transform_general(spec);
    ProblemSpec inner;
    inner.trig = spec.trig;
    inner.length = 1.0;
    inner.eps = t.delta;
    inner.weight = t.g;
    inner.coefficient = constant_weight(1.0);
    EigenResult res = map_back(spec, t, solve_weight_only(inner, k, tol));
    if (static_cast<int>(res.zeros.size()) != k - 1)
      throw SolverError("solve_eigen: transformed solve lost interior zeros");
    return res;
  }
  return solve_weight_only(spec, k, tol);
}

EigenResult solve_eigen_direct(const ProblemSpec& spec, int k, double tol) {
  validate_inputs(spec, k, tol);
  const double mu_k = std::pow(spec.pi_p() * k / spec.length, spec.p());
  const double lo0 = 0.98 * spec.coefficient.lower() * mu_k / spec.weight.upper();
  const double hi0 = 1.02 * weyl_upper_bound(spec.trig->exponent(), 1, k, spec.length,
                                             spec.coefficient.upper(),
                                             spec.weight.lower());
  auto above = [&spec, k](double lam) {
    return integrate_direct(spec, lam).interior_zero_count >= k;
  };
  const auto out = bisect(lo0, hi0, tol, above, "solve_eigen_direct");
  return finish_from_direct(spec, k, out.lambda, out.iterations, 1e-9);
}

std::vector<std::pair<double, double>> reconstruct_eigenfunction(
    const ProblemSpec& spec, const EigenResult& result, int samples) {
  if (samples < 2) throw std::invalid_argument("reconstruct_eigenfunction: samples >= 2");
  if (result.trace.size() < 2)
    throw std::invalid_argument("reconstruct_eigenfunction: result carries no trace");

  std::vector<std::pair<double, double>> out;
  out.reserve(samples);
  size_t seg = 0;
  const auto& tr = result.trace;
  for (int i = 0; i < samples; ++i) {
    const double x = std::min(spec.length * i / (samples - 1), tr.back().x);
    while (seg + 2 < tr.size() && tr[seg + 1].x < x) ++seg;
    double u;
    if (result.route == SolveRoute::phase_system) {
      // interpolate the smooth phase variables, then map through the formula
      const double phi = hermite_eval(tr[seg], tr[seg + 1], 0, x);
      const double amp = hermite_eval(tr[seg], tr[seg + 1], 1, x);
      u = phase_u(spec, result.lambda, x, phi, amp).u / result.peak_scale;
    } else {
      u = hermite_eval(tr[seg], tr[seg + 1], 0, x) / result.peak_scale;
    }
    out.emplace_back(x, u);
  }
  return out;
}

}  // namespace plhom
