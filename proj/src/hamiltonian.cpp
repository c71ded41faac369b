#include "shjb/hamiltonian.hpp"

#include <cmath>

#include "shjb/error.hpp"

namespace shjb {

namespace {

void check_inputs(const CoefficientValues& c, double v, double theta) {
  if (!std::isfinite(v) || !std::isfinite(theta) || !std::isfinite(c.eta) || !std::isfinite(c.lambda) ||
      !std::isfinite(c.gamma)) {
    throw Error(ErrorCode::NonFiniteInput, "non-finite argument to the nonlinearity");
  }
  if (v < 0.0) throw Error(ErrorCode::NegativeValue, "value factor must be nonnegative");
  if (!(c.eta > 0.0)) throw Error(ErrorCode::NonPositiveEta, "eta must be positive");
}

}  // namespace

double nonlinearity_F(const CoefficientValues& c, double v, double theta) {
  check_inputs(c, v, theta);
  const double darkpool = c.gamma > 0.0 ? theta * c.gamma * v / (c.gamma + v) : 0.0;
  return c.lambda - v * v / c.eta + darkpool - theta * v;
}

double dF_dv(const CoefficientValues& c, double v, double theta) {
  check_inputs(c, v, theta);
  double darkpool = 0.0;
  if (c.gamma > 0.0) {
    const double r = c.gamma / (c.gamma + v);
    darkpool = theta * r * r;
  }
  return -2.0 * v / c.eta + darkpool - theta;
}

FeedbackPair feedback_controls(double v, const CoefficientValues& c, double x) {
  check_inputs(c, v, 0.0);
  if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteInput, "non-finite position");
  if (c.gamma + v <= 0.0) throw Error(ErrorCode::DegenerateDenominator, "gamma + v = 0");
  return {v / c.eta * x, v / (c.gamma + v) * x};
}

double hamiltonian_at(const CoefficientValues& c, double v, double x, double xi, double mu, double theta) {
  const double jump = v * (x - mu) * (x - mu) - v * x * x;
  return -2.0 * v * x * xi + theta * jump + c.eta * xi * xi + theta * c.gamma * mu * mu + c.lambda * x * x;
}

}  // namespace shjb
