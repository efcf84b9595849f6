#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace plhom {

enum class Smoothness { smooth, piecewise };

/// Named weight constructor: one of
///   constant c | two-plus-sin | inv-two-plus-sin | two-minus-sin |
///   piecewise a b   (value a on [0,1/2), b on [1/2,1))
struct WeightPreset {
  std::string name;
  std::vector<double> params;
};

/// A 1-periodic, strictly positive weight with cached period statistics.
/// All scalars are computed at construction (means and L1 norms by adaptive
/// quadrature, bounds by scan plus local refinement); instances are immutable
/// afterwards and safe for concurrent reads.
class PeriodicWeight {
 public:
  PeriodicWeight() = default;

  /// Builds from a callable on one period. `derivative` may be empty;
  /// `breakpoints` lists non-smooth interior points of (0,1).
  static PeriodicWeight from_callable(std::string name, std::vector<double> params,
                                      std::function<double(double)> f,
                                      std::function<double(double)> derivative,
                                      std::vector<double> breakpoints,
                                      Smoothness smoothness);

  double eval(double x) const;                     // 1-periodic extension
  double eval_scaled(double eps, double x) const;  // rho(x/eps)
  /// Mean of the two one-sided limits at the reduced point; equals eval()
  /// away from breakpoints. Grid-aligned discretizations want this.
  double eval_avg(double x) const;

  bool has_derivative() const { return static_cast<bool>(df_); }
  double deriv(double x) const;  // throws std::logic_error if unavailable
  /// Derivative of rho(x/eps) at x, carrying the 1/eps chain-rule factor.
  double deriv_scaled(double eps, double x) const;

  /// R(x) = int_0^x (rho - mean) dt; 1-periodic with R(0) = R(1) = 0 and
  /// |R| <= l1_deviation/2.
  double antiderivative_R(double x) const;

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double mean() const { return mean_; }
  double l1_deviation() const { return l1_dev_; }
  double sup_deviation() const { return sup_dev_; }
  Smoothness smoothness() const { return smoothness_; }
  bool is_constant() const { return sup_dev_ == 0.0; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::string& name() const { return name_; }
  const std::vector<double>& params() const { return params_; }

 private:
  std::string name_;
  std::vector<double> params_;
  std::function<double(double)> f_;
  std::function<double(double)> df_;
  std::vector<double> breakpoints_;
  Smoothness smoothness_ = Smoothness::smooth;
  double lower_ = 0, upper_ = 0, mean_ = 0, l1_dev_ = 0, sup_dev_ = 0;
};

/// Resolves a preset; rejects presets that are not strictly positive.
PeriodicWeight build_weight(const WeightPreset& preset);

PeriodicWeight constant_weight(double c);

/// Both sides of the oscillating-weight estimate
///   |int_0^1 (rho(x/eps) - mean) |v|^p dx|
///     <= (p/2) eps ||rho - mean||_1 ||v||_p^{p-1} ||v'||_p
/// for a test function given as (x_i, v_i, v'_i) samples with v(0)=v(1)=0,
/// modeled piecewise by cubic Hermite and integrated by composite adaptive
/// quadrature. Returns {lhs, rhs}.
std::pair<double, double> oscillation_bound_check(
    const PeriodicWeight& w, double eps, const std::vector<double>& xs,
    const std::vector<double>& vs, const std::vector<double>& dvs, double p);

}  // namespace plhom
