#pragma once

#include <utility>
#include <vector>

namespace plhom {

/// Exponent p of the one-dimensional p-Laplacian with its derived constants.
struct PExponent {
  double p = 2.0;
  double p_conj = 2.0;  // p/(p-1)
  double pi_p = 0.0;    // first zero of sin_p
};

/// pi_p = 2*int_0^1 ((p-1)/(1-t^p))^{1/p} dt, evaluated by singularity-
/// tolerant quadrature. Throws std::invalid_argument unless 1 < p < inf.
double compute_pi_p(double p);

/// Generalized sine/cosine for the half-linear equation
///   -(|v'|^{p-2} v')' = |v|^{p-2} v,  v(0) = 0, v'(0) = 1.
///
/// sin_p is that solution: odd, 2*pi_p periodic, zeros at multiples of pi_p,
/// peak value (p-1)^{1/p}, and cos_p := sin_p' so that the first integral
///   (p-1)|cos_p|^p + |sin_p|^p = p-1
/// holds exactly. For p = 2 both reduce to the standard sine/cosine.
///
/// Evaluation inverts the implicit quarter-period relation
///   x = int_0^s ((p-1)/(1-t^p))^{1/p} dt
/// once at construction into a cached interpolation table (cubic Hermite with
/// exact nodal slopes; near the peak the table is parametrized by
/// (pi_p/2 - x)^{p'} where the inverse is analytic). The table is refined
/// until its verified error is below `tolerance`. Instances are immutable
/// and safe to share across threads.
class PTrig {
 public:
  explicit PTrig(double p, double tolerance = 1e-10);

  const PExponent& exponent() const noexcept { return exp_; }
  double p() const noexcept { return exp_.p; }
  double p_conj() const noexcept { return exp_.p_conj; }
  double pi_p() const noexcept { return exp_.pi_p; }
  double tolerance() const noexcept { return tol_; }

  double sin_p(double x) const;
  double cos_p(double x) const;

  /// Max-1 normalized value s and derivative ds at x, i.e. sin_p/(p-1)^{1/p}
  /// and its derivative. The Pruefer right-hand side consumes this pair.
  struct Core {
    double s;
    double ds;
  };
  Core core(double x) const;

  /// Ordered (x, s) samples of the max-1 normalized function on [0, pi_p/2];
  /// s runs from 0 to 1.
  std::vector<std::pair<double, double>> quarter_period_samples() const;

  /// Slow reference evaluation on [0, pi_p/2] by direct inversion of the
  /// defining integral (no table). Used to validate the table.
  double quarter_value_reference(double x) const;

 private:
  void build(int n1, int n2);
  double verify_error() const;
  double eval_quarter(double y) const;  // max-1 value on [0, pi_p/2]

  PExponent exp_;
  double tol_;
  double amp_;      // (p-1)^{1/p}
  double quarter_;  // pi_p/2
  double x_split_;  // region boundary inside the quarter period
  double zeta_max_;
  double k0_;  // d(eta)/d(zeta) at zeta = 0

  // region 1: s(x) on [0, x_split]
  std::vector<double> x1_, s1_, d1_;
  // region 2: eta(zeta) with zeta = (pi_p/2 - x)^{p'}, s = 1 - eta
  std::vector<double> z2_, e2_, d2_;
};

}  // namespace plhom
