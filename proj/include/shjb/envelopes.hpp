#pragma once

#include <cstddef>

#include "shjb/model.hpp"
#include "shjb/pdesolver.hpp"

namespace shjb {

/// Explicit subsolution near the horizon, defined on t in [T - delta, T):
///   eta(y) * (1 - m_ratio*(T-t)) / (exp(theta*(T-t)) * (T-t)).
double check_v(const ModelSpec& model, const SupNorms& norms, double t, double y);

/// Explicit supersolution on [T - delta, T):
///   eta(y) * (1 + m_ratio*(T-t)) / (T-t) + exp(k_prime*(T-t)) * l_ratio * eta(y).
double hat_v(const ModelSpec& model, const SupNorms& norms, double t, double y);

/// exp(k_prime*(T-t)) * l_ratio * eta(y); dominates lambda(y).
double hat_h(const ModelSpec& model, const SupNorms& norms, double t, double y);

/// A-priori upper bound: c_tilde*eta(y) before T - delta, hat_v inside the window.
double global_bound(const ModelSpec& model, const SupNorms& norms, double t, double y);

/// chi = exp(k_n (T-t)) (1+y^2)^{n/2} / (T-t).
double barrier_chi(int n, double k_n, double t, double y, double T);

/// -d_t chi - L chi + chi/(T-t), from analytic derivatives.
double barrier_residual(const ModelSpec& model, int n, double k_n, double t, double y);

/// k_n = 1 + sup_y L h / h + margin, h = (1+y^2)^{n/2}, sampled over the domain.
double choose_kn(const ModelSpec& model, int n, Interval domain, double margin = 1.0);

/// Largest s0 <= delta with check_v*(T-t) >= eta/2 for all T - t <= s0.
double half_crossing(const ModelSpec& model, const SupNorms& norms);

/// Constant C of the linear decay bound |X_s| <= C |x| (T-s)/delta on [T-delta, T).
double liquidation_constant(const SupNorms& norms, double theta);

struct EnvelopeReport {
  std::size_t nodes_checked = 0;
  std::size_t violations = 0;
  double max_rel_violation = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0;
  // v*(T-t) >= eta/2 on [T - delta0, T - eps]
  std::size_t interval_nodes = 0;
  std::size_t interval_violations = 0;
  // max_y |v(T-eps,y)*(T-t)/eta(y) - 1| at the last time node
  double terminal_ratio_dev = 0.0;
};

/// Checks check_v <= v <= hat_v on every grid node in [T - delta, T - eps], with
/// relative slack 1e-8 + allowance.
EnvelopeReport sandwich_report(const ValueSurface& surface, const ModelSpec& model, const SupNorms& norms,
                               double allowance = 1e-2);

bool in_delta_window(const SupNorms& norms, double T, double t);

}  // namespace shjb
