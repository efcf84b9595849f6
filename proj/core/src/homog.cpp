#include "plhom/homog.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "plhom/quadrature.hpp"

namespace plhom {

bool is_unit_fraction(double eps) {
  const double j = 1.0 / eps;
  return std::abs(j - std::round(j)) < 1e-12 * j;
}

double limit_eigenvalue(const LimitSpectrum& spec, int k) {
  if (k < 1) throw std::invalid_argument("limit_eigenvalue: k must be >= 1");
  return spec.a_star * std::pow(spec.p.pi_p * k, spec.p.p) /
         (spec.rho_bar * std::pow(spec.length, spec.p.p));
}

std::pair<double, double> homogenize_coefficient(const PeriodicWeight& a,
                                                 const PExponent& p) {
  const double q = 1.0 / (p.p - 1.0);
  const double L = quad::gk_adaptive([&](double x) { return std::pow(a.eval(x), -q); },
                                     0.0, 1.0, 1e-12, 0.0, &a.breakpoints());
  return {L, std::pow(L, 1.0 - p.p)};
}

// Cumulative antiderivative P of a^{-1/(p-1)} over one period with a monotone
// inversion grid.
struct TransformedProblem::Map {
  std::vector<double> xs, Ps;  // P strictly increasing, Ps.back() = L
  PeriodicWeight a;
  double q = 1.0;  // 1/(p-1)
  double L = 0.0;
  double L_eps = 0.0;
  double eps = 0.0;

  double P_period(double x) const {  // x in [0,1]
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    size_t i = std::max<size_t>(1, it - xs.begin()) - 1;
    i = std::min(i, xs.size() - 2);
    return Ps[i] + quad::gk_adaptive([&](double t) { return std::pow(a.eval(t), -q); },
                                     xs[i], x, 1e-14, 1e-13);
  }

  double P_ext(double x) const {
    const double m = std::floor(x);
    return m * L + P_period(x - m);
  }

  double Pinv_period(double y) const {  // y in [0, L]
    const auto it = std::upper_bound(Ps.begin(), Ps.end(), y);
    size_t i = std::max<size_t>(1, it - Ps.begin()) - 1;
    i = std::min(i, Ps.size() - 2);
    double lo = xs[i], hi = xs[i + 1];
    double x = lo + (hi - lo) * (y - Ps[i]) / (Ps[i + 1] - Ps[i]);
    for (int iter = 0; iter < 60; ++iter) {
      const double err = y - P_period(x);
      if (std::abs(err) <= 1e-15 * (1.0 + std::abs(y))) break;
      if (err > 0.0)
        lo = x;
      else
        hi = x;
      double next = x + err * std::pow(a.eval(x), q);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      x = next;
    }
    return x;
  }

  double Pinv_ext(double y) const {
    const double m = std::floor(y / L);
    return m + Pinv_period(std::clamp(y - m * L, 0.0, L));
  }
};

double TransformedProblem::x_from_z(double z) const {
  return map->eps * map->Pinv_ext(L_eps * z / map->eps);
}

double TransformedProblem::z_from_x(double x) const {
  return map->eps * map->P_ext(x / map->eps) / L_eps;
}

TransformedProblem transform_general(const ProblemSpec& spec) {
  const double p = spec.p();
  const double q = 1.0 / (p - 1.0);
  const auto& a = spec.coefficient;
  const auto& rho = spec.weight;

  auto m = std::make_shared<TransformedProblem::Map>();
  m->a = a;
  m->q = q;
  m->eps = spec.eps;

  // grid over one period including the coefficient's breakpoints
  const int n = 2048;
  m->xs.reserve(n + 8);
  for (int i = 0; i <= n; ++i) m->xs.push_back(static_cast<double>(i) / n);
  for (double b : a.breakpoints()) m->xs.push_back(b);
  std::sort(m->xs.begin(), m->xs.end());
  m->xs.erase(std::unique(m->xs.begin(), m->xs.end(),
                          [](double u, double v) { return std::abs(u - v) < 1e-15; }),
              m->xs.end());
  m->Ps.assign(m->xs.size(), 0.0);
  for (size_t i = 1; i < m->xs.size(); ++i)
    m->Ps[i] = m->Ps[i - 1] +
               quad::gk_adaptive([&](double t) { return std::pow(a.eval(t), -q); },
                                 m->xs[i - 1], m->xs[i], 1e-15, 1e-13);
  m->L = m->Ps.back();

  TransformedProblem t;
  t.L = m->L;
  if (is_unit_fraction(spec.eps)) {
    t.L_eps = t.L;  // eps = 1/j covers whole periods exactly
  } else {
    t.L_eps = spec.eps * m->P_ext(1.0 / spec.eps);
  }
  m->L_eps = t.L_eps;
  t.delta = spec.eps * t.L / t.L_eps;
  t.mu_scale = std::pow(t.L_eps, p);
  t.map = m;

  // g(z) = Q(Lz) with Q(y) = a(x)^{1/(p-1)} rho(x) at x = P^{-1}(y).
  const double L = t.L;
  auto mp = m;
  auto gf = [mp, L, q, rho](double z) {
    const double x = mp->Pinv_period(std::clamp(L * (z - std::floor(z)), 0.0, L));
    return std::pow(mp->a.eval(x), q) * rho.eval(x);
  };
  std::function<double(double)> gdf;
  if (a.has_derivative() && rho.has_derivative()) {
    gdf = [mp, L, q, rho, a](double z) {
      const double x = mp->Pinv_period(std::clamp(L * (z - std::floor(z)), 0.0, L));
      const double av = a.eval(x);
      const double Fp = q * std::pow(av, q - 1.0) * a.deriv(x) * rho.eval(x) +
                        std::pow(av, q) * rho.deriv(x);
      return L * Fp * std::pow(av, q);  // dx/dy = a^{1/(p-1)}
    };
  }
  std::vector<double> gbreaks;
  for (double b : a.breakpoints()) gbreaks.push_back(m->P_period(b) / L);
  for (double b : rho.breakpoints()) gbreaks.push_back(m->P_period(b) / L);
  std::sort(gbreaks.begin(), gbreaks.end());
  gbreaks.erase(std::unique(gbreaks.begin(), gbreaks.end(),
                            [](double u, double v) { return std::abs(u - v) < 1e-13; }),
                gbreaks.end());
  const Smoothness sm = (a.smoothness() == Smoothness::smooth &&
                         rho.smoothness() == Smoothness::smooth)
                            ? Smoothness::smooth
                            : Smoothness::piecewise;
  t.g = PeriodicWeight::from_callable("transformed", {}, gf, gdf, gbreaks, sm);
  return t;
}

BoundReport bound_teo1d(const PeriodicWeight& rho, const PExponent& p, double eps,
                        int k, double length) {
  BoundReport r;
  r.which = BoundKind::teo1d;
  r.constant = 0.5 * p.p * rho.l1_deviation() / (rho.lower() * rho.lower()) *
               std::pow(rho.upper() / rho.lower(), 1.0 / p.p);
  const double eps_unit = eps / length;
  r.bound_value = std::pow(length, -p.p) * r.constant * eps_unit *
                  std::pow(p.pi_p * k, p.p + 1.0);
  return r;
}

BoundReport bound_explicit(const PeriodicWeight& rho, double alpha, double beta,
                           const PExponent& p, int N, double eps, int k) {
  if (N < 1) throw std::invalid_argument("bound_explicit: N must be >= 1");
  BoundReport r;
  r.which = BoundKind::explicit_nd;
  const double pp = p.p;
  const double Nr = static_cast<double>(N);
  r.constant = 0.5 * std::sqrt(Nr) * pp * rho.sup_deviation() *
               std::pow(std::pow(beta, pp + 1.0) / alpha, 1.0 / pp) /
               (rho.lower() * rho.lower()) *
               std::pow(rho.upper() / rho.lower(), 1.0 / pp) *
               std::pow(p.pi_p, pp + 1.0) * std::pow(Nr, (pp + 1.0) / pp) *
               std::pow(std::max(std::pow(Nr, 0.5 * (pp - 2.0)), 1.0), (pp + 1.0) / pp);
  r.bound_value = r.constant * eps * std::pow(k, (pp + 1.0) / Nr);
  return r;
}

BoundReport bound_linear1d(const PeriodicWeight& rho, double eps, int k) {
  BoundReport r;
  r.which = BoundKind::linear1d;
  const double pi = 3.14159265358979323846;
  r.constant = rho.sup_deviation() / (rho.lower() * rho.lower()) *
               std::sqrt(rho.upper() / rho.lower()) * std::pow(pi, 3.0);
  r.bound_value = r.constant * std::pow(k, 3.0) * eps;
  return r;
}

BoundReport bound_general_eq(const TransformedProblem& t, double beta,
                             double rho_minus, const PExponent& p, double eps, int k) {
  BoundReport r;
  r.which = BoundKind::general_eq;
  const double pp = p.p;
  const double prefactor = std::pow(t.L, -pp) * 0.5 * pp * t.g.l1_deviation() /
                           (t.g.lower() * t.g.lower()) *
                           std::pow(t.g.upper() / t.g.lower(), 1.0 / pp);
  r.constant = prefactor;
  const double kpow = std::pow(p.pi_p * k, pp + 1.0);
  if (is_unit_fraction(eps)) {
    r.bound_value = prefactor * eps * kpow;
  } else {
    r.bound_value = prefactor * (eps / (1.0 - eps)) * kpow +
                    (beta / rho_minus) * pp * std::pow(t.L, pp) *
                        std::pow(1.0 + eps, pp - 1.0) * eps * std::pow(p.pi_p * k, pp);
  }
  return r;
}

std::pair<double, double> bound_nodal(int k, const PExponent& p, double eps, double c) {
  const double b = c * eps * (std::pow(static_cast<double>(k), p.p + 1.0) + 1.0);
  return {b, b};
}

double weyl_upper_bound(const PExponent& p, int N, int k, double domain_volume,
                        double beta, double rho_minus) {
  const double Nr = static_cast<double>(N);
  return beta / rho_minus * std::max(std::pow(Nr, 0.5 * (p.p - 2.0)), 1.0) * Nr *
         std::pow(p.pi_p, p.p) * std::pow(k / domain_volume, p.p / Nr);
}

}  // namespace plhom
