#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <utility>

#include "plhom/problem.hpp"
#include "plhom/ptrig.hpp"
#include "plhom/weight.hpp"

namespace plhom {

/// The homogenized limit problem -(a* |u'|^{p-2}u')' = lambda rho_bar |u|^{p-2}u
/// on (0, length), whose spectrum is closed-form.
struct LimitSpectrum {
  PExponent p;
  double length = 1.0;
  double rho_bar = 1.0;
  double a_star = 1.0;
};

/// lambda_k = a* pi_p^p k^p / (rho_bar length^p).
double limit_eigenvalue(const LimitSpectrum& spec, int k);

/// L = mean of a^{-1/(p-1)} over one period; the homogenized coefficient is
/// a* = L^{1-p} (harmonic mean for p = 2). Returns {L, a_star}.
std::pair<double, double> homogenize_coefficient(const PeriodicWeight& a,
                                                 const PExponent& p);

/// Result of the change of variables y = eps*P(x/eps) that removes the
/// oscillating coefficient: a weight-only problem on (0,1) with 1-periodic
/// weight g at scale delta whose eigenvalues are mu = L_eps^p * lambda.
class TransformedProblem {
 public:
  double L = 0.0;
  double L_eps = 0.0;
  double delta = 0.0;
  double mu_scale = 0.0;  // L_eps^p
  PeriodicWeight g;

  /// Maps transformed coordinates z in [0,1] back to x in [0,1].
  double x_from_z(double z) const;
  double z_from_x(double x) const;

  // internal inversion grid, immutable after construction
  struct Map;
  std::shared_ptr<const Map> map;
};

TransformedProblem transform_general(const ProblemSpec& spec);

enum class BoundKind { teo1d, explicit_nd, general_eq, nodal, zeros, linear1d };

struct BoundReport {
  double constant = 0.0;
  double bound_value = 0.0;
  double observed_error = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  BoundKind which = BoundKind::teo1d;

  BoundReport& with_observed(double err) {
    observed_error = err;
    ratio = bound_value > 0.0 ? err / bound_value : std::numeric_limits<double>::quiet_NaN();
    return *this;
  }
};

/// |lambda_k^eps - lambda_k| <= (p/2) (||rho-mean||_1 / rho_-^2) (rho_+/rho_-)^{1/p}
///                              * eps (pi_p k)^{p+1}   on the unit interval.
/// For length != 1 the problem is mapped to (0,1) (x -> x/l, eps -> eps/l,
/// lambda -> l^p lambda), so bound(l) = l^{-p} * C * (eps/l) * (pi_p k)^{p+1}.
BoundReport bound_teo1d(const PeriodicWeight& rho, const PExponent& p, double eps,
                        int k, double length = 1.0);

/// Dimension-generic explicit constant: bound = C eps k^{(p+1)/N} with
/// C = (sqrt(N)/2) p ||rho-mean||_inf (beta^{p+1}/alpha)^{1/p} rho_-^{-2}
///     (rho_+/rho_-)^{1/p} pi_p^{p+1} N^{(p+1)/p} max{N^{(p-2)/2},1}^{(p+1)/p}.
BoundReport bound_explicit(const PeriodicWeight& rho, double alpha, double beta,
                           const PExponent& p, int N, double eps, int k);

/// The simplified linear one-dimensional constant
/// ||rho-mean||_inf / rho_-^2 * sqrt(rho_+/rho_-) * (pi k)^3 * eps; must equal
/// bound_explicit at N = 1, p = 2, alpha = beta = 1.
BoundReport bound_linear1d(const PeriodicWeight& rho, double eps, int k);

/// Coefficient-problem bound through the transformed weight g. For eps = 1/j
///   (1/L^p)(p/2)(||g-mean||_1/g_-^2)(g_+/g_-)^{1/p} eps  (pi_p k)^{p+1};
/// otherwise the eps/(1-eps) variant plus
///   (beta/rho_-) p L^p (1+eps)^{p-1} eps (pi_p k)^p.
BoundReport bound_general_eq(const TransformedProblem& t, double beta,
                             double rho_minus, const PExponent& p, double eps, int k);

/// Nodal-domain and zero displacement bounds c*eps*(k^{p+1}+1); the j-th zero
/// bound is j times the second component.
std::pair<double, double> bound_nodal(int k, const PExponent& p, double eps, double c);

/// A-priori growth bound (beta/rho_-) max{N^{(p-2)/2},1} N pi_p^p (k/|Omega|)^{p/N};
/// dominates lambda_k and lambda_k^eps and seeds the bisection bracket.
double weyl_upper_bound(const PExponent& p, int N, int k, double domain_volume,
                        double beta, double rho_minus);

/// True when 1/eps is an integer to within 1e-12 relative; borderline values
/// fall to the general branch.
bool is_unit_fraction(double eps);

}  // namespace plhom
