#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "plhom/homog.hpp"
#include "plhom/prufer.hpp"

namespace plhom {

/// One sweep cell: both sides of the convergence estimate plus bookkeeping.
struct ConvergenceRecord {
  double eps = 0.0;
  int k = 0;
  double p = 0.0;
  double lambda_eps = 0.0;
  double lambda_limit = 0.0;
  double abs_err = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  double runtime_ms = 0.0;
};

struct RateFit {
  enum class Axis { eps, k };
  Axis axis = Axis::eps;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
};

struct FdResult {
  double lambda = 0.0;
  double error_estimate = 0.0;  // a-posteriori O(h^2) estimate
};

/// Independent p = 2 oracle: central-difference discretization of
/// -(a_eps u')' = lambda rho_eps u with Dirichlet conditions, reduced to a
/// symmetric tridiagonal problem and solved by Sturm-sequence bisection.
/// Rejects p != 2 and grid_points < 1000.
FdResult fd_oracle_p2(const ProblemSpec& spec, int k, int grid_points);

/// Richardson extrapolation of the oracle from grids n and 2n.
double fd_oracle_p2_richardson(const ProblemSpec& spec, int k, int n);

/// Oracle eigenvector at the interior nodes of an n-point grid, normalized to
/// max|u| = 1 with u'(0) > 0. Returns (x_i, u_i) pairs.
std::vector<std::pair<double, double>> fd_eigenvector_p2(const ProblemSpec& spec,
                                                         int k, int n);

/// One record per (eps, k); cells run in parallel and are emitted sorted by
/// (eps, k). Solver failures leave NaN fields in the record (and a message in
/// `failures` when given) instead of aborting the sweep.
std::vector<ConvergenceRecord> sweep_eps(const ProblemSpec& base,
                                         const std::vector<double>& eps_list,
                                         const std::vector<int>& k_list, double tol,
                                         std::vector<std::string>* failures = nullptr);

/// Records for k = 1..k_max at fixed eps. Appends a warning when the bound
/// exceeds the eigenvalue itself (vacuous regime).
std::vector<ConvergenceRecord> sweep_k(const ProblemSpec& base, double eps, int k_max,
                                       double tol,
                                       std::vector<std::string>* warnings = nullptr);

/// Log-log least squares of abs_err against eps or k. Records whose error sits
/// below 10x the solver tolerance are noise and excluded; needs >= 4 points.
std::optional<RateFit> fit_rate(const std::vector<ConvergenceRecord>& records,
                                RateFit::Axis axis, double tol);

struct ZeroRecord {
  double eps = 0.0;
  int j = 0;
  double x_eps = 0.0;
  double x_limit = 0.0;
  double abs_dev = 0.0;
  double bound = 0.0;
};

/// Zero displacement against the limit positions j*length/k for each eps; the
/// bound column is j * c * eps * (k^{p+1}+1) with c taken from the
/// one-dimensional rate constant of the same weight.
std::vector<ZeroRecord> track_zeros(const ProblemSpec& base,
                                    const std::vector<double>& eps_list, int k,
                                    double tol);

/// Canned figure datasets:
///   1: (eps, sqrt_lambda_1) for two-plus-sin
///   2: (eps, lambda_1, sqrt_lambda_1) for inv-two-plus-sin
///   3: (x, u_eps, u_limit, diff, eps_tag) for k = 1 at eps in {1/2, 1/16, 1/64}
///   4: same for k = 4
double fig_eps_min();
std::string figure_data(int figure_id, int resolution);

/// Exact CSV schema: eps,k,p,lambda_eps,lambda_limit,abs_err,bound,ratio,runtime_ms.
/// `provenance` lines are emitted first, prefixed with '#'.
void write_records_csv(std::ostream& os, const std::vector<ConvergenceRecord>& records,
                       const std::vector<std::string>& provenance = {});

void write_zero_records_csv(std::ostream& os, const std::vector<ZeroRecord>& records,
                            const std::vector<std::string>& provenance = {});

/// Shortest %.17g rendering used by every CSV writer (bit-stable reruns).
std::string csv_number(double v);

/// The theorem bound applicable to `spec` (weight-only problems use the
/// one-dimensional rate bound scaled by a constant coefficient; oscillating
/// coefficients go through the transformed-problem bound).
BoundReport applicable_bound(const ProblemSpec& spec, int k);

}  // namespace plhom
