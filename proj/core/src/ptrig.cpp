#include "plhom/ptrig.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plhom/quadrature.hpp"

namespace plhom {
namespace {

constexpr double kNodeResidual = 1e-15;

// (1 - s^p) without cancellation for s near 1.
double one_minus_pow(double s, double p) {
  if (s <= 0.0) return 1.0;
  if (s < 0.5) return 1.0 - std::pow(s, p);
  return -std::expm1(p * std::log(s));
}

// ((p-1)/(1-s^p))^{1/p} = dx/ds of the quarter-period relation.
double dxds(double p, double s) {
  return std::pow((p - 1.0) / one_minus_pow(s, p), 1.0 / p);
}

// Same with 1-s^p supplied directly (accurate near s = 1).
double dxds_omsp(double p, double omsp) {
  return std::pow((p - 1.0) / omsp, 1.0 / p);
}

double hermite(double t, double h, double y0, double d0, double y1, double d1) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 +
         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

// Marching inversion of x = int_0^s dx/ds dt for an increasing target list.
// Integrals run between consecutive iterates, so the total quadrature work is
// one sweep of the quarter period per call.
class QuarterInverter {
 public:
  explicit QuarterInverter(double p) : p_(p) {}

  double solve(double x_target) {
    if (x_target <= 0.0) return 0.0;
    auto integrand = [this](double t) { return dxds(p_, t); };
    double lo = s_, hi = 1.0;
    double s = s_, phi = phi_;
    for (int it = 0; it < 80; ++it) {
      const double err = x_target - phi;
      if (std::abs(err) <= kNodeResidual * (1.0 + x_target)) break;
      double step = err * std::pow(one_minus_pow(s, p_) / (p_ - 1.0), 1.0 / p_);
      double s_next = s + step;
      if (!(s_next > lo && s_next < hi)) s_next = 0.5 * (lo + hi);
      phi += quad::gk_adaptive(integrand, s, s_next, 1e-16, 1e-14);
      s = s_next;
      if (x_target - phi > 0.0)
        lo = s;
      else
        hi = s;
    }
    s_ = s;
    phi_ = phi;
    return s;
  }

 private:
  double p_;
  double s_ = 0.0;
  double phi_ = 0.0;
};

// Distance to the peak as a function of eta = 1 - s:
//   tail(eta) = int_{1-eta}^{1} dx/ds dt,
// regularized by 1 - t = tau^{2p'} so the integrand vanishes linearly at 0.
double peak_tail(double p, double p_conj, double eta) {
  if (eta <= 0.0) return 0.0;
  const double T = std::pow(eta, 1.0 / (2.0 * p_conj));
  const double two_pc = 2.0 * p_conj;
  const double c_asym = 2.0 * p_conj * std::pow((p - 1.0) / p, 1.0 / p);
  auto integrand = [&](double tau) {
    const double log_omt = two_pc * std::log(tau);
    if (log_omt < -640.0) return c_asym * tau;
    const double omt = std::exp(log_omt);
    const double omtp = -std::expm1(p * std::log1p(-omt));
    return two_pc * std::pow(tau, two_pc - 1.0) * dxds_omsp(p, omtp);
  };
  return quad::gk_adaptive(integrand, 0.0, T, 1e-16, 1e-13);
}

// Solves peak_tail(eta) = delta with a bracketed Newton iteration.
double invert_peak_tail(double p, double p_conj, double delta, double eta_guess) {
  if (delta <= 0.0) return 0.0;
  double eta = std::clamp(eta_guess, 1e-300, 0.999);
  double lo = 0.0, hi = 1.0;  // tail(1) is the full quarter period, above any delta used here
  for (int it = 0; it < 80; ++it) {
    const double err = delta - peak_tail(p, p_conj, eta);
    const double omsp = -std::expm1(p * std::log1p(-eta));
    const double slope = dxds_omsp(p, omsp);  // d tail / d eta
    if (std::abs(err) <= kNodeResidual * (1.0 + delta)) break;
    if (err > 0.0)
      lo = eta;
    else
      hi = eta;
    double next = eta + err / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    eta = next;
  }
  return eta;
}

}  // namespace

double compute_pi_p(double p) {
  if (!std::isfinite(p) || p <= 1.0)
    throw std::invalid_argument("compute_pi_p: p must be finite and > 1");
  const double half = quad::tanh_sinh(
      [p](double /*t*/, double omt) {
        const double omtp = -std::expm1(p * std::log1p(-omt));
        return std::pow((p - 1.0) / omtp, 1.0 / p);
      },
      1e-14);
  return 2.0 * half;
}

PTrig::PTrig(double p, double tolerance) : tol_(tolerance) {
  if (!std::isfinite(p) || p <= 1.0)
    throw std::invalid_argument("PTrig: p must be finite and > 1");
  exp_.p = p;
  exp_.p_conj = p / (p - 1.0);
  exp_.pi_p = compute_pi_p(p);
  amp_ = std::pow(p - 1.0, 1.0 / p);
  quarter_ = 0.5 * exp_.pi_p;
  x_split_ = 0.875 * quarter_;
  zeta_max_ = std::pow(quarter_ - x_split_, exp_.p_conj);
  const double f0 = std::pow((p - 1.0) / p, 1.0 / p) * exp_.p_conj;
  k0_ = std::pow(f0, -exp_.p_conj);

  int n1 = 2048, n2 = 257;
  for (;;) {
    build(n1, n2);
    const double err = verify_error();
    if (err <= tol_) break;
    n1 *= 2;
    n2 = 2 * (n2 - 1) + 1;
    if (n1 > 32768)
      throw std::runtime_error("PTrig: table refinement failed to reach tolerance");
  }
}

void PTrig::build(int n1, int n2) {
  const double p = exp_.p;
  const double pc = exp_.p_conj;

  x1_.assign(n1, 0.0);
  s1_.assign(n1, 0.0);
  d1_.assign(n1, 0.0);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < n1; ++i)
    x1_[i] = x_split_ * 0.5 * (1.0 - std::cos(pi * i / (n1 - 1)));
  x1_.back() = x_split_;

  QuarterInverter inv(p);
  for (int i = 0; i < n1; ++i) {
    s1_[i] = inv.solve(x1_[i]);
    d1_[i] = 1.0 / dxds(p, s1_[i]);
  }

  z2_.assign(n2, 0.0);
  e2_.assign(n2, 0.0);
  d2_.assign(n2, 0.0);
  d2_[0] = k0_;
  const double hz = zeta_max_ / (n2 - 1);
  for (int j = 1; j < n2; ++j) {
    z2_[j] = hz * j;
    const double delta = std::pow(z2_[j], 1.0 / pc);
    const double guess = j == 1 ? k0_ * z2_[j] : e2_[j - 1] * (z2_[j] / z2_[j - 1]);
    e2_[j] = invert_peak_tail(p, pc, delta, guess);
    const double omsp = -std::expm1(p * std::log1p(-e2_[j]));
    d2_[j] = std::pow(delta, 1.0 - pc) / (pc * dxds_omsp(p, omsp));
  }

  // The two parametrizations must meet at the split point.
  const double s_boundary = 1.0 - e2_.back();
  if (std::abs(s_boundary - s1_.back()) > 1e-11)
    throw std::runtime_error("PTrig: region boundary mismatch");
}

double PTrig::eval_quarter(double y) const {
  if (y <= 0.0) return 0.0;
  if (y >= quarter_) return 1.0;
  if (y >= x_split_) {
    const double delta = quarter_ - y;
    const double zeta = std::pow(delta, exp_.p_conj);
    const double hz = z2_[1];
    int j = std::min<int>(static_cast<int>(zeta / hz), static_cast<int>(z2_.size()) - 2);
    const double t = (zeta - z2_[j]) / hz;
    const double eta = hermite(t, hz, e2_[j], d2_[j], e2_[j + 1], d2_[j + 1]);
    return 1.0 - eta;
  }
  const auto it = std::upper_bound(x1_.begin(), x1_.end(), y);
  int i = std::max<int>(1, static_cast<int>(it - x1_.begin())) - 1;
  i = std::min<int>(i, static_cast<int>(x1_.size()) - 2);
  const double h = x1_[i + 1] - x1_[i];
  const double t = (y - x1_[i]) / h;
  return hermite(t, h, s1_[i], d1_[i], s1_[i + 1], d1_[i + 1]);
}

double PTrig::quarter_value_reference(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= quarter_) return 1.0;
  if (x >= x_split_) {
    const double delta = quarter_ - x;
    const double guess = k0_ * std::pow(delta, exp_.p_conj);
    return 1.0 - invert_peak_tail(exp_.p, exp_.p_conj, delta, guess);
  }
  QuarterInverter inv(exp_.p);
  return inv.solve(x);
}

double PTrig::verify_error() const {
  double worst = 0.0;
  {
    QuarterInverter inv(exp_.p);
    for (size_t i = 0; i + 1 < x1_.size(); ++i) {
      const double xm = 0.5 * (x1_[i] + x1_[i + 1]);
      worst = std::max(worst, std::abs(eval_quarter(xm) - inv.solve(xm)));
    }
  }
  for (size_t j = 0; j + 1 < z2_.size(); ++j) {
    const double zm = 0.5 * (z2_[j] + z2_[j + 1]);
    const double delta = std::pow(zm, 1.0 / exp_.p_conj);
    const double eta = invert_peak_tail(exp_.p, exp_.p_conj, delta, k0_ * zm);
    worst = std::max(worst, std::abs(eval_quarter(quarter_ - delta) - (1.0 - eta)));
  }
  return worst;
}

PTrig::Core PTrig::core(double x) const {
  const double period = 4.0 * quarter_;
  double t = x / period;
  t -= std::floor(t);
  double y = t * period;

  int q = static_cast<int>(y / quarter_);
  q = std::clamp(q, 0, 3);
  double u;
  double sgn_s, sgn_c;
  switch (q) {
    case 0: u = y; sgn_s = 1.0; sgn_c = 1.0; break;
    case 1: u = 2.0 * quarter_ - y; sgn_s = 1.0; sgn_c = -1.0; break;
    case 2: u = y - 2.0 * quarter_; sgn_s = -1.0; sgn_c = -1.0; break;
    default: u = 4.0 * quarter_ - y; sgn_s = -1.0; sgn_c = 1.0; break;
  }
  u = std::clamp(u, 0.0, quarter_);

  const double s = eval_quarter(u);
  const double omsp = one_minus_pow(s, exp_.p);
  const double ds = std::pow(omsp / (exp_.p - 1.0), 1.0 / exp_.p);
  return {sgn_s * s, sgn_c * ds};
}

double PTrig::sin_p(double x) const { return amp_ * core(x).s; }

double PTrig::cos_p(double x) const { return amp_ * core(x).ds; }

std::vector<std::pair<double, double>> PTrig::quarter_period_samples() const {
  std::vector<std::pair<double, double>> out;
  out.reserve(x1_.size() + z2_.size());
  for (size_t i = 0; i < x1_.size(); ++i) out.emplace_back(x1_[i], s1_[i]);
  for (size_t j = z2_.size(); j-- > 0;) {
    const double x = quarter_ - std::pow(z2_[j], 1.0 / exp_.p_conj);
    if (x <= out.back().first) continue;
    out.emplace_back(x, 1.0 - e2_[j]);
  }
  return out;
}

}  // namespace plhom
