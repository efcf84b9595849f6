#include "plhom/prufer.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "plhom/experiments.hpp"
#include "test_util.hpp"

using namespace plhom;

namespace {
constexpr double kPi = 3.14159265358979323846;

ProblemSpec unit_spec(double p, PeriodicWeight w, double eps, double length = 1.0) {
  return ProblemSpec::make(p, std::move(w), eps, length);
}
}  // namespace

TEST_CASE("phase_rhs closed-form spot checks") {
  // constant weight: dphi = (lambda c)^{1/p}, damp = 0
  for (double p : {1.5, 2.0, 3.0}) {
    auto spec = unit_spec(p, constant_weight(2.0), 0.5);
    const auto d = phase_rhs(spec, 10.0, {0.3, 1.234, 1.0});
    CHECK(d.dphi == doctest::Approx(std::pow(20.0, 1.0 / p)).epsilon(1e-12));
    CHECK(d.damp == 0.0);
  }
  // phi = 0 kills both correction terms
  {
    auto spec = unit_spec(2.0, test::two_plus_sin(), 0.1);
    const double lam = 7.0, x = 0.23;
    const auto d = phase_rhs(spec, lam, {x, 0.0, 1.0});
    const double r = 2.0 + std::sin(2 * kPi * x / 0.1);
    CHECK(d.dphi == doctest::Approx(std::sqrt(lam * r)).epsilon(1e-12));
    CHECK(d.damp == 0.0);
  }
  // p = 2 spot value against a hand-evaluated right-hand side
  {
    const double eps = 0.1, lam = 10.0, x = 0.3, phi = 1.0, amp = 1.0;
    auto spec = unit_spec(2.0, test::two_plus_sin(), eps);
    const double r = 2.0 + std::sin(2 * kPi * x / eps);
    const double dr = (2 * kPi / eps) * std::cos(2 * kPi * x / eps);
    const double expected_dphi =
        std::sqrt(lam * r) + 0.5 * (dr / r) * std::cos(phi) * std::sin(phi);
    const double expected_damp = 0.5 * (dr / r) * amp * std::sin(phi) * std::sin(phi);
    const auto d = phase_rhs(spec, lam, {x, phi, amp});
    CHECK(d.dphi == doctest::Approx(expected_dphi).epsilon(1e-10));
    CHECK(d.damp == doctest::Approx(expected_damp).epsilon(1e-10));
  }
  // piecewise weights are rejected here
  auto pw = unit_spec(2.0, test::piecewise_weight(1.0, 4.0), 0.25);
  CHECK_THROWS_AS(phase_rhs(pw, 1.0, {0.1, 0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("integrate_phase constant-weight anchors") {
  {
    auto spec = unit_spec(2.0, constant_weight(1.0), 1.0);
    CHECK(integrate_phase(spec, kPi * kPi).phi_end == doctest::Approx(kPi).epsilon(1e-7));
  }
  {
    // for constant r = 1 the phase speed is lambda^{1/p}, so lambda = pi_p^p
    // lands the phase exactly at pi_p (the direct system agrees; see below)
    auto spec = unit_spec(3.0, constant_weight(1.0), 1.0);
    const double pip = spec.pi_p();
    CHECK(integrate_phase(spec, std::pow(pip, 3.0)).phi_end ==
          doctest::Approx(pip).epsilon(1e-7));
  }
}

TEST_CASE("integrate_phase self-convergence under tolerance refinement") {
  auto spec = unit_spec(2.0, test::two_plus_sin(), 0.25);
  const double a = integrate_phase(spec, 4.0, 1e-9).phi_end;
  const double b = integrate_phase(spec, 4.0, 1e-11).phi_end;
  CHECK(std::abs(a - b) < 1e-7);
}

TEST_CASE("integrate_direct anchors") {
  auto spec = unit_spec(2.0, constant_weight(1.0), 1.0);
  CHECK(std::abs(integrate_direct(spec, kPi * kPi).u_end) < 1e-7);
  const double u_mid = integrate_direct(spec, kPi * kPi / 4.0).u_end;
  CHECK(u_mid == doctest::Approx(2.0 / kPi).epsilon(1e-7));  // sin(pi x /2)*(2/pi) at 1
  CHECK(u_mid > 0.0);
}

TEST_CASE("integrate_direct agrees with the matrix oracle for a piecewise weight") {
  auto spec = unit_spec(2.0, test::piecewise_weight(1.0, 4.0), 1.0 / 6.0);
  const double lam = fd_oracle_p2_richardson(spec, 1, 12000);
  const auto direct = integrate_direct(spec, lam);
  double peak = 0.0;
  for (const auto& st : direct.trace) peak = std::max(peak, std::abs(st.y[0]));
  CHECK(std::abs(direct.u_end) / peak < 1e-5);
}

TEST_CASE("phase endpoint is strictly increasing in lambda") {
  std::mt19937 rng(5);
  for (const auto& w : {constant_weight(1.5), test::two_plus_sin(), test::inv_two_plus_sin()}) {
    for (double p : {1.5, 2.0, 3.0}) {
      auto spec = unit_spec(p, w, 0.2);
      std::uniform_real_distribution<double> U(1.0, 80.0);
      for (int i = 0; i < 5; ++i) {
        double a = U(rng), b = U(rng);
        if (a > b) std::swap(a, b);
        if (b - a < 1e-3) continue;
        CHECK(integrate_phase(spec, a).phi_end < integrate_phase(spec, b).phi_end);
      }
    }
  }
}

TEST_CASE("constant-coefficient exactness") {
  for (double p : {1.5, 2.0, 3.0}) {
    auto spec = unit_spec(p, constant_weight(1.0), 1.0);
    const double pip = spec.pi_p();
    for (int k = 1; k <= 10; ++k) {
      const auto r = solve_eigen(spec, k, 1e-9);
      const double exact = std::pow(pip * k, p);
      CHECK(std::abs(r.lambda - exact) <= 1e-6 * exact);
      CHECK(static_cast<int>(r.zeros.size()) == k - 1);
    }
  }
  // constant weight rescales the spectrum
  auto spec2 = unit_spec(2.0, constant_weight(2.0), 1.0);
  CHECK(solve_eigen(spec2, 1).lambda == doctest::Approx(kPi * kPi / 2).epsilon(1e-7));
}

TEST_CASE("oscillating-weight limit values") {
  {
    auto spec = unit_spec(2.0, test::two_plus_sin(), 1.0 / 32.0);
    const auto r = solve_eigen(spec, 1);
    CHECK(std::abs(std::sqrt(r.lambda) - kPi / std::sqrt(2.0)) < 0.02);
  }
  {
    auto spec = unit_spec(2.0, test::inv_two_plus_sin(), 1.0 / 32.0);
    const auto r = solve_eigen(spec, 1);
    CHECK(std::abs(r.lambda - std::sqrt(3.0) * kPi * kPi) < 0.2);
  }
}

TEST_CASE("interior zero count and interlacing") {
  auto spec = unit_spec(2.0, test::two_plus_sin(), 0.125);
  for (int k = 1; k <= 5; ++k) {
    const auto r = solve_eigen(spec, k);
    REQUIRE(static_cast<int>(r.zeros.size()) == k - 1);
    for (size_t j = 1; j < r.zeros.size(); ++j) CHECK(r.zeros[j] > r.zeros[j - 1]);
    for (double z : r.zeros) {
      CHECK(z > 0.0);
      CHECK(z < spec.length);
    }
  }
}

TEST_CASE("eigenvalues are ordered") {
  for (const auto& w : {test::two_plus_sin(), test::piecewise_weight(1.0, 4.0)}) {
    auto spec = unit_spec(2.0, w, 0.25);
    double prev = 0.0;
    for (int k = 1; k <= 4; ++k) {
      const double lam = solve_eigen(spec, k).lambda;
      CHECK(lam > prev);
      prev = lam;
    }
  }
}

TEST_CASE("endpoint mode agrees with phase mode") {
  auto spec = unit_spec(2.0, test::two_plus_sin(), 0.25);
  const double tol = 1e-8;
  for (int k : {1, 3}) {
    const auto a = solve_eigen(spec, k, tol);
    const auto b = solve_eigen(spec, k, tol, SolveMode::endpoint,
                               std::make_pair(0.9 * a.lambda, 1.1 * a.lambda));
    CHECK(std::abs(a.lambda - b.lambda) <= 10.0 * tol * a.lambda);
  }
  // a bracket around the wrong eigenvalue is refused
  const auto l2 = solve_eigen(spec, 2).lambda;
  CHECK_THROWS_AS(
      solve_eigen(spec, 1, tol, SolveMode::endpoint, std::make_pair(0.9 * l2, 1.1 * l2)),
      SolverError);
  CHECK_THROWS_AS(solve_eigen(spec, 1, tol, SolveMode::endpoint, std::nullopt),
                  std::invalid_argument);
}

TEST_CASE("interval scaling for constant data") {
  for (double p : {1.5, 2.0, 3.0}) {
    auto s1 = unit_spec(p, constant_weight(1.0), 1.0, 1.0);
    for (double l : {0.5, 2.0}) {
      auto sl = unit_spec(p, constant_weight(1.0), 1.0, l);
      for (int k : {1, 3}) {
        const double lam1 = solve_eigen(s1, k).lambda;
        const double laml = solve_eigen(sl, k).lambda;
        CHECK(laml == doctest::Approx(lam1 / std::pow(l, p)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("p = 2 shooting matches the matrix oracle across presets") {
  for (const auto& w : {constant_weight(2.0), test::two_plus_sin(),
                        test::inv_two_plus_sin(), test::piecewise_weight(1.0, 4.0)}) {
    for (double eps : {0.25, 0.125}) {
      auto spec = unit_spec(2.0, w, eps);
      for (int k : {1, 4}) {
        const double sh = solve_eigen(spec, k).lambda;
        const double fd = fd_oracle_p2_richardson(spec, k, 8000);
        CHECK(std::abs(sh - fd) <= 1e-4 * sh);
      }
    }
  }
}

TEST_CASE("eigenfunction reconstruction") {
  {
    auto spec = unit_spec(2.0, constant_weight(1.0), 1.0);
    const auto r = solve_eigen(spec, 1);
    for (const auto& [x, u] : reconstruct_eigenfunction(spec, r, 257))
      CHECK(std::abs(u - std::sin(kPi * x)) < 1e-6);
  }
  {
    // k = 2 eigenfunction of the plain p-Laplacian is sin_p(2 pi_p x), max 1
    auto spec = unit_spec(3.0, constant_weight(1.0), 1.0);
    const auto r = solve_eigen(spec, 2);
    const double amp = std::pow(2.0, 1.0 / 3.0);
    for (const auto& [x, u] : reconstruct_eigenfunction(spec, r, 257))
      CHECK(std::abs(u - spec.trig->sin_p(2 * spec.pi_p() * x) / amp) < 1e-5);
  }
  {
    auto spec = unit_spec(2.0, test::two_plus_sin(), 0.1);
    const auto r = solve_eigen(spec, 1);
    const int n = 4000;
    const auto fd = fd_eigenvector_p2(spec, 1, n);
    const auto mine = reconstruct_eigenfunction(spec, r, n + 1);
    double sup = 0.0;
    for (size_t i = 0; i < fd.size(); ++i)
      sup = std::max(sup, std::abs(fd[i].second - mine[i + 1].second));
    CHECK(sup < 1e-3);
  }
}

TEST_CASE("input validation and failure paths") {
  CHECK_THROWS_AS(ProblemSpec::make(2.0, constant_weight(1.0), 5e-5),
                  std::domain_error);
  auto spec = unit_spec(2.0, test::two_plus_sin(), 0.25);
  CHECK_THROWS_AS(spec.with_eps(1e-5), std::domain_error);
  CHECK_THROWS_AS(solve_eigen(spec, 0), std::invalid_argument);
  CHECK_THROWS_AS(solve_eigen(spec, 1, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate_phase(spec, -2.0), std::invalid_argument);
  CHECK_THROWS_AS(ProblemSpec::make(2.0, constant_weight(1.0), 0.5, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(reconstruct_eigenfunction(spec, EigenResult{}, 100),
                  std::invalid_argument);
}

TEST_CASE("eps of order one is allowed") {
  auto spec = unit_spec(2.0, test::two_plus_sin(), 2.0);
  const auto r = solve_eigen(spec, 1);
  CHECK(r.lambda > 0.0);
  CHECK(r.zeros.empty());
}
