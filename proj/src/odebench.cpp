#include "shjb/odebench.hpp"

#include <algorithm>
#include <cmath>

#include "shjb/error.hpp"

namespace shjb {

double ode_rhs(double a, double theta, double kappa) {
  return a * a + (theta - kappa) * a - 1.0 - theta * a / (1.0 + a);
}

OdeTable solve_a(double theta, double kappa, double T, double eps_ode, int n_steps) {
  if (!(eps_ode > 0.0) || eps_ode > T / 10.0) throw Error(ErrorCode::BadParameter, "eps_ode must lie in (0, T/10]");
  if (n_steps < 100) throw Error(ErrorCode::BadParameter, "n_steps must be >= 100");

  OdeTable tab;
  tab.theta = theta;
  tab.kappa = kappa;
  tab.T = T;
  tab.eps = eps_ode;

  // time-to-go s runs from eps_ode to T on a log-uniform mesh, so h/s is constant
  const std::size_t n = static_cast<std::size_t>(n_steps);
  std::vector<double> s(n + 1);
  const double log_ratio = std::log(T / eps_ode);
  for (std::size_t i = 0; i <= n; ++i) s[i] = eps_ode * std::exp(log_ratio * static_cast<double>(i) / n_steps);
  s.front() = eps_ode;
  s.back() = T;

  // in s, da/ds = -ode_rhs(a)
  const auto f = [&](double a) { return -ode_rhs(a, theta, kappa); };
  std::vector<double> a(n + 1);
  a[0] = 1.0 / eps_ode;
  const double upper = 10.0 / eps_ode;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = s[i + 1] - s[i];
    const double y = a[i];
    const double k1 = f(y);
    const double k2 = f(y + 0.5 * h * k1);
    const double k3 = f(y + 0.5 * h * k2);
    const double k4 = f(y + h * k3);
    a[i + 1] = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!(a[i + 1] > 0.0) || !(a[i + 1] < upper)) {
      throw Error(ErrorCode::BlowupBackward, "a(t) left (0, 10/eps_ode)");
    }
  }
  // near the horizon a must decrease as time-to-go grows
  if (!(a[1] < a[0])) throw Error(ErrorCode::BlowupBackward, "a(t) not decreasing away from the horizon");

  tab.t_nodes.resize(n + 1);
  tab.a_values.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    tab.t_nodes[n - i] = T - s[i];
    tab.a_values[n - i] = a[i];
  }
  tab.t_nodes.front() = 0.0;
  return tab;
}

double OdeTable::a_at(double t) const {
  const double tol = 1e-12 * T;
  if (!(t >= t_nodes.front() - tol && t <= t_nodes.back() + tol)) {
    throw Error(ErrorCode::OutOfGrid, "t outside the ODE table");
  }
  t = std::clamp(t, t_nodes.front(), t_nodes.back());
  auto it = std::upper_bound(t_nodes.begin(), t_nodes.end(), t);
  std::size_t i = it == t_nodes.begin() ? 0 : static_cast<std::size_t>(it - t_nodes.begin()) - 1;
  i = std::min(i, t_nodes.size() - 2);
  const double s0 = T - t_nodes[i], s1 = T - t_nodes[i + 1];
  const double w0 = s0 * a_values[i], w1 = s1 * a_values[i + 1];
  const double r = (t - t_nodes[i]) / (t_nodes[i + 1] - t_nodes[i]);
  return ((1.0 - r) * w0 + r * w1) / (T - t);
}

SeparableComparison separable_compare(const ValueSurface& surface, const OdeTable& table, const ModelSpec& model,
                                      double y_abs_max, double t_margin_in_eps) {
  const Grid& g = surface.grid();
  const Interval domain{g.y_nodes.front(), g.y_nodes.back()};
  const auto kappa = separable_kappa(model, domain);
  if (!kappa) throw Error(ErrorCode::NotSeparable, "model fails the L eta = kappa eta, lambda = gamma = eta check");
  if (std::abs(*kappa - table.kappa) > 1e-9 * std::max(1.0, std::abs(*kappa)) ||
      std::abs(model.theta - table.theta) > 1e-12) {
    throw Error(ErrorCode::NotSeparable, "ODE table was built for different (theta, kappa)");
  }

  SeparableComparison out;
  out.y_abs_max = y_abs_max;
  out.t_max = model.T - t_margin_in_eps * g.eps;
  for (std::size_t k = 0; k < g.n_t(); ++k) {
    const double t = g.t_nodes[k];
    if (t > out.t_max + 1e-12) continue;
    const double a = table.a_at(t);
    for (std::size_t j = 0; j < g.n_y(); ++j) {
      const double y = g.y_nodes[j];
      if (std::abs(y) > y_abs_max + 1e-12) continue;
      const double ref = a * model.eta(y);
      const double err = std::abs(surface.at(k, j) - ref) / ref;
      ++out.nodes;
      if (err > out.max_rel_error) {
        out.max_rel_error = err;
        out.at_t = t;
        out.at_y = y;
      }
    }
  }
  return out;
}

}  // namespace shjb
