#include "shjb/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "shjb/envelopes.hpp"
#include "shjb/error.hpp"
#include "shjb/hamiltonian.hpp"
#include "shjb/parallel.hpp"

namespace shjb {

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

McSetup setup_for(const McConfig& mc, double t0, double y0, double x0) {
  McSetup s;
  s.t0 = t0;
  s.y0 = y0;
  s.x0 = x0;
  s.dt = mc.dt;
  s.n_paths = mc.n_paths;
  s.base_seed = mc.seed;
  s.threads = mc.threads;
  return s;
}

}  // namespace

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

CheckResult verify_value(const ValueField& value, const ModelSpec& model, double t0, double y0, double x0,
                         const McConfig& mc, double rel_tol, CostEstimate* estimate) {
  Stopwatch sw;
  const CostEstimate est = monte_carlo(value, model, setup_for(mc, t0, y0, x0));
  const double target = value.value(t0, y0) * x0 * x0;
  CheckResult r;
  char name[96];
  std::snprintf(name, sizeof name, "value(t0=%g;y0=%g;x0=%g)", t0, y0, x0);
  r.name = name;
  r.measured = std::abs(est.mean - target);
  r.threshold = std::max(3.0 * est.std_error, rel_tol * target);
  r.pass = r.measured <= r.threshold;
  r.seed = mc.seed;
  r.detail = fmt("mc=%.6g pde=%.6g", est.mean, target);
  r.runtime_ms = sw.ms();
  if (estimate) *estimate = est;
  return r;
}

CheckResult verify_suboptimality(const ValueField& value, const ModelSpec& model, double t0, double y0, double x0,
                                 const std::vector<Perturbation>& perturbations, const McConfig& mc,
                                 std::vector<std::pair<std::string, CostEstimate>>* estimates) {
  Stopwatch sw;
  if (perturbations.empty()) throw Error(ErrorCode::BadSimulationParams, "no perturbations given");
  const McSetup setup = setup_for(mc, t0, y0, x0);
  const CostEstimate base = monte_carlo(value, model, setup);
  if (estimates) estimates->emplace_back("optimal", base);

  CheckResult r;
  r.name = "suboptimality";
  r.threshold = 3.0;
  r.measured = INFINITY;
  r.seed = mc.seed;
  for (const Perturbation& p : perturbations) {
    const CostEstimate alt = monte_carlo(value, model, setup, p);
    if (estimates) estimates->emplace_back(p.label(), alt);
    const double combined = std::sqrt(base.std_error * base.std_error + alt.std_error * alt.std_error);
    const double z = combined > 0.0 ? (alt.mean - base.mean) / combined : (alt.mean > base.mean ? INFINITY : 0.0);
    if (z < r.measured) {
      r.measured = z;
      r.detail = p.label() + fmt(": perturbed=%.6g optimal=%.6g", alt.mean, base.mean);
    }
  }
  r.pass = r.measured > r.threshold;
  r.runtime_ms = sw.ms();
  return r;
}

std::vector<PathSample> simulate_batch(const ValueField& value, const ModelSpec& model, double t0, double y0,
                                       double x0, const McConfig& mc, Perturbation perturbation) {
  return parallel_map<PathSample>(mc.n_paths, mc.threads, [&](std::size_t i) {
    return simulate_policy(value, model, t0, y0, x0, mc.dt, path_seeds(mc.seed, i), perturbation);
  });
}

CheckResult verify_liquidation(const std::vector<PathSample>& paths, const ModelSpec& model, const SupNorms& norms) {
  Stopwatch sw;
  CheckResult r;
  r.name = "liquidation";
  r.threshold = liquidation_constant(norms, model.theta);
  const double T = model.T;
  double worst_terminal = 0.0;
  for (const PathSample& p : paths) {
    const double x0 = std::abs(p.x_path.front());
    if (x0 == 0.0) continue;
    const std::size_t N = p.times.size() - 1;
    for (std::size_t i = 0; i < N; ++i) {
      const double s = p.times[i];
      if (s < T - norms.delta) continue;
      r.measured = std::max(r.measured, std::abs(p.x_path[i]) * norms.delta / (x0 * (T - s)));
    }
    worst_terminal = std::max(worst_terminal, std::abs(p.x_path[N - 1]) / x0);
  }
  r.pass = r.measured <= r.threshold;
  if (!paths.empty()) r.seed = paths.front().seeds.brownian;
  r.detail = fmt("max |X(T-dt)|/x0=%.3g over %g paths", worst_terminal, static_cast<double>(paths.size()));
  r.runtime_ms = sw.ms();
  return r;
}

CheckResult verify_fbsde(const ValueField& value, const ModelSpec& model, double t, double s, double y,
                         const McConfig& mc, double rel_tol) {
  Stopwatch sw;
  if (!(t <= s) || !(s <= value.last_time())) throw Error(ErrorCode::BadSimulationParams, "need t <= s <= T - eps");
  CheckResult r;
  char name[96];
  std::snprintf(name, sizeof name, "fbsde(t=%g;s=%g;y=%g)", t, s, y);
  r.name = name;
  r.seed = mc.seed;
  const double target = value.value(t, y);
  if (s == t) {
    r.threshold = rel_tol * target;
    r.pass = true;
    r.runtime_ms = sw.ms();
    return r;
  }
  const TimeMesh mesh = make_mesh(t, s, mc.dt);
  const std::vector<double> samples = parallel_map<double>(mc.n_paths, mc.threads, [&](std::size_t i) {
    const SeedPair seeds = path_seeds(mc.seed, i);
    const std::vector<double> ys = simulate_factor(model, t, y, mc.dt, seeds.brownian, s);
    double integral = 0.0;
    double f_prev = 0.0;
    for (std::size_t k = 0; k <= mesh.steps; ++k) {
      const double tk = mesh.at(k);
      const double f = nonlinearity_F(eval_coefficients(model, ys[k]), value.value(tk, ys[k]), model.theta);
      if (k > 0) integral += 0.5 * mesh.h * (f_prev + f);
      f_prev = f;
    }
    return value.value(s, ys.back()) + integral;
  });
  const CostEstimate est = summarize(samples, mc.seed);
  r.measured = std::abs(est.mean - target);
  r.threshold = std::max(3.0 * est.std_error, rel_tol * target);
  r.pass = r.measured <= r.threshold;
  r.detail = fmt("E[U]=%.6g v=%.6g", est.mean, target);
  r.runtime_ms = sw.ms();
  return r;
}

CheckResult verify_residual_cost(const ValueField& value, const ModelSpec& model, double t0, double y0, double x0,
                                 const std::vector<double>& checkpoints, const McConfig& mc,
                                 Perturbation perturbation, std::vector<double>* values) {
  Stopwatch sw;
  if (checkpoints.empty() || !std::is_sorted(checkpoints.begin(), checkpoints.end()))
    throw Error(ErrorCode::BadSimulationParams, "checkpoints must be increasing");
  const TimeMesh mesh = make_mesh(t0, model.T, mc.dt);
  std::vector<std::size_t> idx;
  for (double c : checkpoints) idx.push_back(static_cast<std::size_t>(std::llround((c - t0) / mesh.h)));

  const auto per_path = parallel_map<std::vector<double>>(mc.n_paths, mc.threads, [&](std::size_t i) {
    const PathSample p = simulate_policy(value, model, t0, y0, x0, mc.dt, path_seeds(mc.seed, i), perturbation);
    std::vector<double> out;
    for (std::size_t k : idx) {
      const double x = p.x_path[k];
      out.push_back(x == 0.0 ? 0.0 : value.value(p.times[k], p.y_path[k]) * x * x);
    }
    return out;
  });

  std::vector<double> means;
  std::vector<double> column(mc.n_paths);
  for (std::size_t c = 0; c < idx.size(); ++c) {
    for (std::size_t i = 0; i < mc.n_paths; ++i) column[i] = per_path[i][c];
    means.push_back(pairwise_sum(column) / static_cast<double>(mc.n_paths));
  }

  CheckResult r;
  r.name = "residual_cost";
  r.seed = mc.seed;
  const double scale = value.value(t0, y0) * x0 * x0;
  bool decreasing = true;
  for (std::size_t c = 1; c < means.size(); ++c) decreasing = decreasing && means[c] <= means[c - 1];
  r.measured = means.back();
  r.threshold = 0.05 * scale;
  r.pass = decreasing && r.measured <= r.threshold;
  r.detail = decreasing ? "nonincreasing" : "not decreasing";
  r.runtime_ms = sw.ms();
  if (values) *values = means;
  return r;
}

}  // namespace shjb
