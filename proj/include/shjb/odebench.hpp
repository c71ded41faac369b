#pragma once

#include <vector>

#include "shjb/model.hpp"
#include "shjb/pdesolver.hpp"

namespace shjb {

/// Backward solution a(t) of the separable-solution ODE on [0, T - eps_ode].
struct OdeTable {
  std::vector<double> t_nodes;  // increasing, last entry T - eps_ode
  std::vector<double> a_values;
  double theta = 0.0;
  double kappa = 0.0;
  double T = 1.0;
  double eps = 1e-3;

  /// Interpolates (T-t)*a(t) linearly and divides back out. Throws OutOfGrid.
  double a_at(double t) const;
};

/// da/dt = a^2 + (theta - kappa) a - 1 - theta a/(1+a), for v = a(t) eta(y) when
/// L eta = kappa eta and lambda = gamma = eta.
double ode_rhs(double a, double theta, double kappa);

/// Classical RK4, integrated backward from a(T - eps_ode) = 1/eps_ode on nodes
/// geometrically spaced in T - t.
OdeTable solve_a(double theta, double kappa, double T, double eps_ode, int n_steps);

struct SeparableComparison {
  double max_rel_error = 0.0;
  double at_t = 0.0;
  double at_y = 0.0;
  double y_abs_max = 6.0;
  double t_max = 0.0;
  std::size_t nodes = 0;
};

/// max |v - a eta| / (a eta) over grid nodes with |y| <= y_abs_max and t <= T - t_margin.
/// Throws NotSeparable unless the model passes the separable_kappa check.
SeparableComparison separable_compare(const ValueSurface& surface, const OdeTable& table, const ModelSpec& model,
                                      double y_abs_max = 6.0, double t_margin_in_eps = 10.0);

}  // namespace shjb
