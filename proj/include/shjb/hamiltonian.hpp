#pragma once

#include "shjb/model.hpp"

namespace shjb {

/// Optimal controls at one state: lit-market trading rate and dark-pool order size.
struct FeedbackPair {
  double xi_rate = 0.0;
  double mu_size = 0.0;
};

/// HJB nonlinearity
///   F(y,v) = lambda - v^2/eta + theta*gamma*v/(gamma+v) - theta*v.
/// With gamma = 0 the dark-pool ratio term is taken as 0.
double nonlinearity_F(const CoefficientValues& c, double v, double theta);

/// Partial derivative of nonlinearity_F in v.
double dF_dv(const CoefficientValues& c, double v, double theta);

/// xi = (v/eta)*x, mu = v/(gamma+v)*x.
FeedbackPair feedback_controls(double v, const CoefficientValues& c, double x);

/// Hamiltonian for V = v*x^2 evaluated at arbitrary controls (xi, mu):
///   -2*v*x*xi + theta*(v*(x-mu)^2 - v*x^2) + eta*xi^2 + theta*gamma*mu^2 + lambda*x^2.
double hamiltonian_at(const CoefficientValues& c, double v, double x, double xi, double mu, double theta);

}  // namespace shjb
