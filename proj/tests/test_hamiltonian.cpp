#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "shjb/error.hpp"
#include "shjb/hamiltonian.hpp"
#include "shjb/model.hpp"

using namespace shjb;

namespace {

CoefficientValues unit_coeffs() {
  CoefficientValues c;
  c.eta = 1.0;
  c.lambda = 1.0;
  c.gamma = 1.0;
  return c;
}

// F written out independently
double F_ref(const CoefficientValues& c, double v, double theta) {
  const double dark = c.gamma > 0.0 ? theta * c.gamma * v / (c.gamma + v) : 0.0;
  return c.lambda - v * v / c.eta + dark - theta * v;
}

}  // namespace

TEST_CASE("nonlinearity worked values") {
  const CoefficientValues c = unit_coeffs();
  CHECK(nonlinearity_F(c, 0.0, 2.0) == 1.0);
  CHECK(nonlinearity_F(c, 1.0, 2.0) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("F at v = 0 is lambda exactly") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-5.0, 5.0);
  for (const char* name : {"ex1a", "ex1b", "ex2"}) {
    const ModelSpec m = build_model(name);
    for (int i = 0; i < 200; ++i) {
      const CoefficientValues c = eval_coefficients(m, U(rng));
      CHECK(nonlinearity_F(c, 0.0, m.theta) == c.lambda);
    }
  }
}

TEST_CASE("ex1a: v = eta gives F = -eta") {
  const ModelSpec m = build_model("ex1a");
  for (double y = -4.0; y <= 4.0; y += 0.5) {
    const CoefficientValues c = eval_coefficients(m, y);
    CHECK(nonlinearity_F(c, c.eta, m.theta) == doctest::Approx(-c.eta).epsilon(1e-14));
  }
}

TEST_CASE("dF/dv worked values and finite-difference agreement") {
  const CoefficientValues c = unit_coeffs();
  CHECK(dF_dv(c, 1.0, 2.0) == doctest::Approx(-3.5).epsilon(1e-15));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> Y(-4.0, 4.0), V(0.0, 20.0);
  const ModelSpec m = build_model("ex2");
  for (int i = 0; i < 500; ++i) {
    const CoefficientValues ci = eval_coefficients(m, Y(rng));
    CHECK(std::abs(dF_dv(ci, 0.0, m.theta)) <= 1e-15);
    const double v = V(rng) + 1e-3;
    const double h = 1e-6 * std::max(1.0, v);
    const double fd = (F_ref(ci, v + h, m.theta) - F_ref(ci, v - h, m.theta)) / (2.0 * h);
    CHECK(dF_dv(ci, v, m.theta) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("dF/dv bound in the large-v region") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> Y(-10.0, 10.0), S(1e-3, 1.0), M(1.0, 10.0);
  for (const char* name : {"ex1a", "ex1b", "ex2"}) {
    const ModelSpec m = build_model(name);
    for (int i = 0; i < 2000; ++i) {
      const CoefficientValues c = eval_coefficients(m, Y(rng));
      const double s = S(rng);
      const double v = M(rng) * c.eta / (2.0 * s);
      CHECK(dF_dv(c, v, m.theta) <= -1.0 / s);
    }
  }
}

TEST_CASE("feedback controls") {
  const FeedbackPair p = feedback_controls(1.0, unit_coeffs(), 2.0);
  CHECK(p.xi_rate == 2.0);
  CHECK(p.mu_size == 1.0);
  const FeedbackPair z = feedback_controls(0.0, unit_coeffs(), 3.0);
  CHECK(z.xi_rate == 0.0);
  CHECK(z.mu_size == 0.0);
  const FeedbackPair big = feedback_controls(1e12, unit_coeffs(), 1.0);
  CHECK(big.mu_size == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("hamiltonian identities") {
  const ModelSpec m = build_model("ex2");
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> Y(-3.0, 8.0), V(0.0, 50.0), X(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const CoefficientValues c = eval_coefficients(m, Y(rng));
    const double v = V(rng), x = X(rng);
    const FeedbackPair p = feedback_controls(v, c, x);
    const double H = hamiltonian_at(c, v, x, p.xi_rate, p.mu_size, m.theta);
    CHECK(H == doctest::Approx(nonlinearity_F(c, v, m.theta) * x * x).epsilon(1e-12));
  }
  const CoefficientValues c = eval_coefficients(m, 1.0);
  CHECK(hamiltonian_at(c, 3.0, 1.0, 0.0, 0.0, m.theta) == doctest::Approx(c.lambda).epsilon(1e-15));
}

TEST_CASE("brute-force grid minimum sits at the feedback pair") {
  const ModelSpec m = build_model("ex1a");
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> Y(-2.0, 2.0), V(0.1, 5.0);
  for (int trial = 0; trial < 5; ++trial) {
    const CoefficientValues c = eval_coefficients(m, Y(rng));
    const double v = V(rng) * c.eta;
    const double x = 1.0;
    const double step = 1e-3 * x;
    const FeedbackPair p = feedback_controls(v, c, x);
    double best = std::numeric_limits<double>::infinity(), bx = 0, bm = 0;
    const int n = static_cast<int>(3.0 * x / step);
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const double H = hamiltonian_at(c, v, x, i * step, j * step, m.theta);
        if (H < best) best = H, bx = i * step, bm = j * step;
      }
    }
    if (p.xi_rate <= 3.0 * x) CHECK(std::abs(bx - p.xi_rate) <= step);
    CHECK(std::abs(bm - p.mu_size) <= step);
  }
}

TEST_CASE("input checks") {
  const CoefficientValues c = unit_coeffs();
  CHECK_THROWS_AS(nonlinearity_F(c, -1.0, 1.0), Error);
  CHECK_THROWS_AS(nonlinearity_F(c, std::nan(""), 1.0), Error);
  CoefficientValues g0 = c;
  g0.gamma = 0.0;
  try {
    feedback_controls(0.0, g0, 1.0);
    FAIL("expected DegenerateDenominator");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateDenominator);
  }
  try {
    dF_dv(c, -2.0, 1.0);
    FAIL("expected NegativeValue");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeValue);
  }
  // gamma = 0 drops the dark-pool ratio term
  CHECK(nonlinearity_F(g0, 2.0, 3.0) == doctest::Approx(1.0 - 4.0 - 6.0));
}
