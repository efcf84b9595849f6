#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "plhom/ode.hpp"
#include "plhom/problem.hpp"

namespace plhom {

/// Pruefer variables at one abscissa: phase phi and (positive) amplitude.
struct PhaseState {
  double x = 0.0;
  double phi = 0.0;
  double amp = 1.0;
};

struct PhaseDerivative {
  double dphi = 0.0;
  double damp = 0.0;
};

/// Right-hand side of the phase/amplitude system for the weight-only problem
/// with effective weight r(x) = rho(x/eps)/a (a constant):
///   phi' = (lambda r)^{1/p} + (1/p)(r'/r) |C(phi)|^{p-2} C(phi) S(phi)
///   amp' = (1/p)(r'/r) amp |s(phi)|^p
/// where S = sin_p, C = sin_p' and s is the max-1 normalized value. The
/// leading coefficient is fixed so that the phase hits k*pi_p exactly at the
/// eigenvalues of the direct system (see solve_eigen). Requires a smooth
/// weight; piecewise weights must go through integrate_direct.
PhaseDerivative phase_rhs(const ProblemSpec& spec, double lambda, const PhaseState& state);

struct PhaseIntegration {
  double phi_end = 0.0;
  double amp_end = 1.0;
  std::vector<OdeStep> trace;  // y = {phi, amp}
};

/// Integrates the phase system from phi(0)=0, amp(0)=1 to x=length with
/// adaptive error control; the step size is capped at eps/20 whenever the
/// weight actually oscillates, and by a quarter of the solution wavelength.
/// hmax_factor tightens the cap further (the converged solve densifies its
/// trace this way so zeros and samples interpolate well below tolerance).
PhaseIntegration integrate_phase(const ProblemSpec& spec, double lambda,
                                 double rtol = 1e-9, double hmax_factor = 1.0);

struct DirectIntegration {
  double u_end = 0.0;
  double w_end = 0.0;
  std::vector<OdeStep> trace;  // y = {u, w},  w = a_eps |u'|^{p-2} u'
  int interior_zero_count = 0;
};

/// First-order flux form of the full equation, valid for piecewise weights
/// and coefficients (integration restarts at every discontinuity of the
/// scaled data): u' = |w/a|^{p'-2}(w/a), w' = -lambda rho_eps |u|^{p-2}u,
/// u(0)=0, w(0)=1.
DirectIntegration integrate_direct(const ProblemSpec& spec, double lambda,
                                   double rtol = 1e-9, double hmax_factor = 1.0);

enum class SolveMode { phase, endpoint };
enum class SolveRoute { phase_system, direct_system };

struct EigenResult {
  int k = 0;
  double lambda = 0.0;
  double phase_at_end = 0.0;  // NaN when solved through the direct system
  std::vector<double> zeros;  // exactly k-1 interior zeros
  std::vector<std::pair<double, double>> function_samples;  // normalized, max|u|=1
  std::vector<double> derivative_samples;  // u' at the same abscissae
  int iterations = 0;
  double residual = 0.0;  // |phi(l) - k pi_p| or |u(l)| depending on the path

  // Dense solver trace behind the samples. For p > 2 the eigenfunction is not
  // C^2 at its peaks, so resampling goes through the smooth phase variables
  // and the reconstruction formula rather than a polynomial model of u.
  SolveRoute route = SolveRoute::phase_system;
  std::vector<OdeStep> trace;
  double peak_scale = 1.0;  // max|u| of the unnormalized trace
};

/// Finds the k-th Dirichlet eigenvalue by bisection.
///
/// mode phase (default): the map lambda -> phi(length) is strictly increasing,
/// so bisection on phi(length) = k*pi_p starts from the a-priori bracket
/// alpha*mu_k/rho_+ <= lambda_k <= beta*mu_k/rho_- (mu_k = (pi_p k/length)^p)
/// and is certified to isolate the k-th eigenvalue. Piecewise weights use the
/// equivalent Sturm zero-count bisection on the direct system; a non-constant
/// coefficient is removed first by the change of variables (transform_general)
/// and the transformed weight-only problem is shot instead.
///
/// mode endpoint: the sign-bisection on u(length) inside a caller-supplied
/// bracket that must isolate exactly one eigenvalue.
///
/// Both modes stop when the relative bracket width drops below tol (or after
/// 200 iterations). Throws SolverError on bracket failure.
EigenResult solve_eigen(const ProblemSpec& spec, int k, double tol = 1e-8,
                        SolveMode mode = SolveMode::phase,
                        std::optional<std::pair<double, double>> bracket = std::nullopt);

/// Zero-count bisection directly on the untransformed system; reference path
/// for coefficient problems (used to validate the transform route).
EigenResult solve_eigen_direct(const ProblemSpec& spec, int k, double tol = 1e-8);

/// Resamples the stored eigenfunction onto `samples` uniform abscissae in
/// [0, length]; normalization max|u| = 1 with u'(0) > 0.
std::vector<std::pair<double, double>> reconstruct_eigenfunction(
    const ProblemSpec& spec, const EigenResult& result, int samples);

}  // namespace plhom
