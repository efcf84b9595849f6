#pragma once

#include <memory>
#include <stdexcept>

#include "plhom/ptrig.hpp"
#include "plhom/weight.hpp"

namespace plhom {

/// One Dirichlet eigenproblem instance on (0, length):
///   -(a(x/eps) |u'|^{p-2} u')' = lambda rho(x/eps) |u|^{p-2} u,
///   u(0) = u(length) = 0.
/// Holds the shared sin_p evaluation table for its exponent; copies share it.
struct ProblemSpec {
  std::shared_ptr<const PTrig> trig;
  double length = 1.0;
  double eps = 1.0;
  PeriodicWeight weight;
  PeriodicWeight coefficient;

  static constexpr double kMinEps = 1e-4;

  static ProblemSpec make(double p, PeriodicWeight rho, double eps, double length = 1.0,
                          PeriodicWeight a = constant_weight(1.0)) {
    if (!(length > 0.0)) throw std::invalid_argument("ProblemSpec: length must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("ProblemSpec: eps must be positive");
    if (eps < kMinEps)
      throw std::domain_error(
          "ProblemSpec: eps below 1e-4 is outside the supported range (weight "
          "oscillations would be under-resolved)");
    ProblemSpec s;
    s.trig = std::make_shared<PTrig>(p);
    s.length = length;
    s.eps = eps;
    s.weight = std::move(rho);
    s.coefficient = std::move(a);
    return s;
  }

  ProblemSpec with_eps(double new_eps) const {
    if (!(new_eps > 0.0)) throw std::invalid_argument("with_eps: eps must be positive");
    if (new_eps < kMinEps)
      throw std::domain_error("with_eps: eps below 1e-4 is outside the supported range");
    ProblemSpec s = *this;
    s.eps = new_eps;
    return s;
  }

  double p() const { return trig->p(); }
  double p_conj() const { return trig->p_conj(); }
  double pi_p() const { return trig->pi_p(); }
  bool constant_coefficient() const { return coefficient.is_constant(); }
};

}  // namespace plhom
