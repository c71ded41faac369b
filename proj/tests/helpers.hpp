#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "shjb/model.hpp"

namespace testing_support {

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Generator applied to eta by central finite differences; independent of the analytic path.
inline double fd_generator_eta(const shjb::ModelSpec& m, double y, double h = 1e-4) {
  const double e0 = m.eta(y), ep = m.eta(y + h), em = m.eta(y - h);
  const double s = m.sigma(y);
  return 0.5 * s * s * (ep - 2.0 * e0 + em) / (h * h) + m.drift(y) * (ep - em) / (2.0 * h);
}

/// Riccati right-hand side written out independently of the library.
inline double riccati_rhs(double a, double theta, double kappa) {
  return a * a + (theta - kappa) * a - 1.0 - theta * a / (1.0 + a);
}

/// Independent reference for a(t): midpoint rule in the variable w = s*a on a
/// log-spaced s grid, many steps. Returns a(T - s_target).
inline double reference_a(double theta, double kappa, double eps, double s_target, int steps = 400000) {
  // dw/ds = a + s * da/ds with da/ds = -a'(t) = -rhs(a)
  const auto dw = [&](double s, double w) {
    const double a = w / s;
    return a - s * riccati_rhs(a, theta, kappa);
  };
  const double l0 = std::log(eps), l1 = std::log(s_target);
  const double dl = (l1 - l0) / steps;
  double w = 1.0;  // s * a at s = eps
  for (int i = 0; i < steps; ++i) {
    const double s0 = std::exp(l0 + i * dl);
    const double sm = std::exp(l0 + (i + 0.5) * dl);
    const double s1 = std::exp(l0 + (i + 1) * dl);
    const double k1 = dw(s0, w);
    const double wm = w + (sm - s0) * k1;
    w += (s1 - s0) * dw(sm, wm);
  }
  return w / s_target;
}

}  // namespace testing_support
