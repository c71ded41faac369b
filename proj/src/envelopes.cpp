#include "shjb/envelopes.hpp"

#include <algorithm>
#include <cmath>

#include "shjb/error.hpp"

namespace shjb {

bool in_delta_window(const SupNorms& norms, double T, double t) {
  return t >= T - norms.delta - 1e-12 * T && t < T;
}

namespace {

double time_to_go(const SupNorms& norms, double T, double t) {
  if (!in_delta_window(norms, T, t)) throw Error(ErrorCode::OutsideDeltaWindow, "t outside [T - delta, T)");
  return std::min(T - t, norms.delta);
}

}  // namespace

double check_v(const ModelSpec& model, const SupNorms& norms, double t, double y) {
  const double s = time_to_go(norms, model.T, t);
  const double num = std::max(0.0, 1.0 - norms.m_ratio * s);
  return model.eta(y) * num / (std::exp(model.theta * s) * s);
}

double hat_h(const ModelSpec& model, const SupNorms& norms, double t, double y) {
  return std::exp(norms.k_prime * (model.T - t)) * norms.l_ratio * model.eta(y);
}

double hat_v(const ModelSpec& model, const SupNorms& norms, double t, double y) {
  const double s = time_to_go(norms, model.T, t);
  return model.eta(y) * (1.0 + norms.m_ratio * s) / s + hat_h(model, norms, t, y);
}

double global_bound(const ModelSpec& model, const SupNorms& norms, double t, double y) {
  if (t > model.T - norms.delta) return hat_v(model, norms, t, y);
  return norms.c_tilde * model.eta(y);
}

double barrier_chi(int n, double k_n, double t, double y, double T) {
  return std::exp(k_n * (T - t)) * std::pow(1.0 + y * y, 0.5 * n) / (T - t);
}

double barrier_residual(const ModelSpec& model, int n, double k_n, double t, double y) {
  const double s = model.T - t;
  const double chi = barrier_chi(n, k_n, t, y, model.T);
  const double d_t = chi * (1.0 / s - k_n);
  const double L_chi = std::exp(k_n * s) / s * generator_of_power(model, 1.0, 0.5 * n, y);
  return -d_t - L_chi + chi / s;
}

double choose_kn(const ModelSpec& model, int n, Interval domain, double margin) {
  const int samples = 20001;
  const double h = (domain.hi - domain.lo) / (samples - 1);
  double sup = -INFINITY;
  for (int i = 0; i < samples; ++i) {
    const double y = domain.lo + i * h;
    sup = std::max(sup, generator_of_power(model, 1.0, 0.5 * n, y) / std::pow(1.0 + y * y, 0.5 * n));
  }
  return 1.0 + sup + margin;
}

double half_crossing(const ModelSpec& model, const SupNorms& norms) {
  const auto g = [&](double s) { return (1.0 - norms.m_ratio * s) * std::exp(-model.theta * s) - 0.5; };
  if (g(norms.delta) >= 0.0) return norms.delta;
  double lo = 0.0, hi = norms.delta;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) >= 0.0 ? lo : hi) = mid;
  }
  return lo;
}

double liquidation_constant(const SupNorms& norms, double theta) {
  const auto integrand = [&](double u) {
    const double first = u > 0.0 ? -std::expm1(-theta * u) / u : theta;
    return first + norms.m_ratio * std::exp(-theta * u);
  };
  const int n = 4000;  // composite Simpson, even
  const double h = norms.delta / n;
  double sum = integrand(0.0) + integrand(norms.delta);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * integrand(i * h);
  return std::exp(sum * h / 3.0);
}

EnvelopeReport sandwich_report(const ValueSurface& surface, const ModelSpec& model, const SupNorms& norms,
                               double allowance) {
  const Grid& g = surface.grid();
  const double T = model.T;
  const double tol = 1e-8 + allowance;
  const double delta0 = half_crossing(model, norms);

  EnvelopeReport rep;
  rep.y_lo = g.y_nodes.front();
  rep.y_hi = g.y_nodes.back();
  rep.t_hi = g.t_nodes.back();
  rep.t_lo = rep.t_hi;

  bool any = false;
  for (std::size_t k = 0; k < g.n_t(); ++k) {
    const double t = g.t_nodes[k];
    if (!in_delta_window(norms, T, t)) continue;
    if (!any) rep.t_lo = t;
    any = true;
    const bool interval_region = T - t <= delta0;
    for (std::size_t j = 0; j < g.n_y(); ++j) {
      const double y = g.y_nodes[j];
      const double v = surface.at(k, j);
      const double lo = check_v(model, norms, t, y);
      const double hi = hat_v(model, norms, t, y);
      double rel = 0.0;
      if (lo > 0.0) rel = std::max(rel, (lo - v) / lo);
      rel = std::max(rel, (v - hi) / hi);
      rep.max_rel_violation = std::max(rep.max_rel_violation, rel);
      ++rep.nodes_checked;
      if (rel > tol) ++rep.violations;

      if (interval_region) {
        ++rep.interval_nodes;
        if (v * (T - t) < 0.5 * model.eta(y) * (1.0 - tol)) ++rep.interval_violations;
      }
    }
  }
  if (!any) throw Error(ErrorCode::EmptyWindow, "no time node inside [T - delta, T - eps]");

  const std::size_t last = g.n_t() - 1;
  const double s_last = T - g.t_nodes[last];
  for (std::size_t j = 0; j < g.n_y(); ++j) {
    const double dev = std::abs(surface.at(last, j) * s_last / model.eta(g.y_nodes[j]) - 1.0);
    rep.terminal_ratio_dev = std::max(rep.terminal_ratio_dev, dev);
  }
  return rep;
}

}  // namespace shjb
