#include "plhom/ptrig.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "test_util.hpp"

using namespace plhom;
using plhom::test::pi_p_beta_oracle;
using plhom::test::sinp_ivp_oracle;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("compute_pi_p matches the closed forms") {
  CHECK(compute_pi_p(2.0) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(compute_pi_p(3.0) == doctest::Approx(3.046992).epsilon(1e-6));
  for (double p : {1.2, 1.5, 2.0, 2.5, 3.0, 4.0, 10.0})
    CHECK(std::abs(compute_pi_p(p) - pi_p_beta_oracle(p)) <=
          1e-9 * pi_p_beta_oracle(p));
  CHECK(std::abs(compute_pi_p(1.5) - pi_p_beta_oracle(1.5)) < 1e-8);
}

TEST_CASE("compute_pi_p rejects invalid exponents") {
  CHECK_THROWS_AS(compute_pi_p(1.0), std::invalid_argument);
  CHECK_THROWS_AS(compute_pi_p(0.5), std::invalid_argument);
  CHECK_THROWS_AS(compute_pi_p(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(compute_pi_p(std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
  CHECK_THROWS_AS(PTrig(1.0), std::invalid_argument);
}

TEST_CASE("anchor values") {
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    PTrig t(p);
    CHECK(t.sin_p(0.0) == 0.0);
    CHECK(t.cos_p(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    // first integral fixes the peak at (p-1)^{1/p}
    CHECK(t.sin_p(t.pi_p() / 2) ==
          doctest::Approx(std::pow(p - 1.0, 1.0 / p)).epsilon(1e-10));
    CHECK(std::abs(t.cos_p(t.pi_p() / 2)) < 1e-9);
  }
  PTrig t2(2.0);
  CHECK(t2.sin_p(kPi / 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(t2.cos_p(kPi / 2)) < 1e-12);
}

TEST_CASE("ivp oracle agreement for p = 3") {
  PTrig t(3.0);
  const auto trace = sinp_ivp_oracle(3.0, 3.0);
  const double q = 1.0 / 2.0;  // p' - 1
  for (const auto& st : trace) {
    if (st.x < 0.05) continue;
    CHECK(std::abs(t.sin_p(st.x) - st.y[0]) < 1e-8);
    const double vprime =
        st.y[1] == 0.0 ? 0.0
                       : (st.y[1] > 0 ? std::pow(st.y[1], q) : -std::pow(-st.y[1], q));
    if (std::abs(vprime) > 0.1) CHECK(std::abs(t.cos_p(st.x) - vprime) < 1e-8);
  }
  // the spot value the implicit and IVP routes must share
  const auto probe = sinp_ivp_oracle(3.0, 0.7);
  CHECK(t.sin_p(0.7) == doctest::Approx(probe.back().y[0]).epsilon(1e-9));
  CHECK(t.cos_p(0.7) ==
        doctest::Approx(std::pow(probe.back().y[1], 0.5)).epsilon(1e-9));
}

TEST_CASE("energy identity at random arguments") {
  for (double p : {1.2, 1.5, 2.0, 2.5, 3.0, 4.0, 10.0}) {
    PTrig t(p);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-3.0 * t.pi_p(), 3.0 * t.pi_p());
    for (int i = 0; i < 1000; ++i) {
      const double x = U(rng);
      const double e = (p - 1.0) * std::pow(std::abs(t.cos_p(x)), p) +
                       std::pow(std::abs(t.sin_p(x)), p);
      CHECK(std::abs(e - (p - 1.0)) < 1e-8);
    }
  }
}

TEST_CASE("periodicity, oddness, reflection") {
  for (double p : {1.5, 2.0, 3.0}) {
    PTrig t(p);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-2.0 * t.pi_p(), 2.0 * t.pi_p());
    for (int i = 0; i < 500; ++i) {
      const double x = U(rng);
      CHECK(std::abs(t.sin_p(x + 2 * t.pi_p()) - t.sin_p(x)) < 1e-9);
      CHECK(std::abs(t.sin_p(-x) + t.sin_p(x)) < 1e-9);
      CHECK(std::abs(t.sin_p(t.pi_p() - x) - t.sin_p(x)) < 1e-9);
    }
  }
}

TEST_CASE("zeros at multiples of pi_p") {
  for (double p : {1.5, 2.0, 3.0, 10.0}) {
    PTrig t(p);
    for (int j = -3; j <= 3; ++j) CHECK(std::abs(t.sin_p(j * t.pi_p())) < 1e-9);
  }
}

TEST_CASE("p = 2 degeneracy against the standard functions") {
  PTrig t(2.0);
  CHECK(t.pi_p() == doctest::Approx(kPi).epsilon(1e-12));
  for (int i = 0; i <= 10000; ++i) {
    const double x = -10.0 + 20.0 * i / 10000.0;
    CHECK(std::abs(t.sin_p(x) - std::sin(x)) < 1e-10);
    CHECK(std::abs(t.cos_p(x) - std::cos(x)) < 1e-10);
  }
}

TEST_CASE("quarter period table invariants") {
  for (double p : {1.5, 3.0}) {
    PTrig t(p);
    const auto samples = t.quarter_period_samples();
    REQUIRE(samples.size() > 100);
    CHECK(samples.front().first == 0.0);
    CHECK(samples.front().second == 0.0);
    CHECK(samples.back().first == doctest::Approx(t.pi_p() / 2).epsilon(1e-14));
    CHECK(samples.back().second == doctest::Approx(1.0).epsilon(1e-12));
    for (size_t i = 1; i < samples.size(); ++i) {
      CHECK(samples[i].first > samples[i - 1].first);
      CHECK(samples[i].second > samples[i - 1].second);
    }
  }
}

TEST_CASE("table matches direct inversion off the nodes") {
  PTrig t(3.0);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> U(0.0, t.pi_p() / 2);
  const double amp = std::pow(2.0, 1.0 / 3.0);
  for (int i = 0; i < 50; ++i) {
    const double x = U(rng);
    CHECK(std::abs(t.sin_p(x) / amp - t.quarter_value_reference(x)) <= t.tolerance());
  }
}
