#include "shjb/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "shjb/error.hpp"
#include "shjb/parallel.hpp"
#include "shjb/rng.hpp"

namespace shjb {

double SurfaceField::value(double t, double y) const {
  try {
    return surface_.eval(t, y);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::OutOfGrid) throw Error(ErrorCode::SurfaceGapError, e.what());
    throw;
  }
}

double SeparableField::value(double t, double y) const {
  try {
    return table_.a_at(t) * model_.eta(y);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::OutOfGrid) throw Error(ErrorCode::SurfaceGapError, e.what());
    throw;
  }
}

SeedPair path_seeds(std::uint64_t base_seed, std::uint64_t path_index) {
  return {derive_seed(base_seed, path_index, Stream::Brownian), derive_seed(base_seed, path_index, Stream::Poisson)};
}

std::string Perturbation::label() const {
  char buf[64];
  switch (kind) {
    case Kind::None: return "optimal";
    case Kind::ScaleXi: std::snprintf(buf, sizeof buf, "scale_xi(%g)", param); return buf;
    case Kind::NoDarkpool: return "no_darkpool";
    case Kind::FreezeAfter: std::snprintf(buf, sizeof buf, "freeze_after(%g)", param); return buf;
  }
  return "unknown";
}

TimeMesh make_mesh(double t0, double t_end, double dt) {
  if (!(t_end > t0) || !(dt > 0.0)) throw Error(ErrorCode::BadSimulationParams, "need t_end > t0 and dt > 0");
  TimeMesh m;
  m.t0 = t0;
  m.t_end = t_end;
  m.steps = static_cast<std::size_t>(std::max<long long>(1, std::llround((t_end - t0) / dt)));
  m.h = (t_end - t0) / static_cast<double>(m.steps);
  return m;
}

std::vector<double> simulate_factor(const ModelSpec& model, double t0, double y0, double dt,
                                    std::uint64_t brownian_seed, double t_end) {
  if (t_end < 0.0) t_end = model.T;
  if (dt > (model.T - t0) / 100.0 * (1.0 + 1e-9)) {
    throw Error(ErrorCode::BadSimulationParams, "dt must be <= (T - t0)/100");
  }
  const TimeMesh mesh = make_mesh(t0, t_end, dt);
  const CounterRng rng(brownian_seed, static_cast<std::uint32_t>(Stream::Brownian));
  const double sq = std::sqrt(mesh.h);
  std::vector<double> y(mesh.steps + 1);
  y[0] = y0;
  std::array<double, 2> z{};
  for (std::size_t i = 0; i < mesh.steps; ++i) {
    if (i % 2 == 0) z = rng.normal_pair(i / 2);
    const double yi = y[i];
    y[i + 1] = yi + model.drift(yi) * mesh.h + model.sigma(yi) * sq * z[i % 2];
  }
  return y;
}

std::vector<double> simulate_jumps(double theta, double t0, double T, std::uint64_t poisson_seed) {
  if (theta < 0.0) throw Error(ErrorCode::NegativeIntensity, "theta must be >= 0");
  std::vector<double> times;
  if (theta == 0.0) return times;
  const CounterRng rng(poisson_seed, static_cast<std::uint32_t>(Stream::Poisson));
  double t = t0;
  for (std::uint64_t i = 0;; ++i) {
    t += -std::log(rng.uniform(i)) / theta;
    if (t > T) break;
    times.push_back(t);
  }
  return times;
}

PathSample simulate_policy(const ValueField& value, const ModelSpec& model, double t0, double y0, double x0,
                           double dt, SeedPair seeds, Perturbation perturbation) {
  const double T = model.T;
  if (perturbation.kind == Perturbation::Kind::ScaleXi && !(perturbation.param > 0.5)) {
    throw Error(ErrorCode::BadSimulationParams, "scale_xi factor must exceed 1/2");
  }
  const TimeMesh mesh = make_mesh(t0, T, dt);
  const std::size_t N = mesh.steps;
  if (N < 2) throw Error(ErrorCode::BadSimulationParams, "need at least two time steps");

  PathSample p;
  p.seeds = seeds;
  p.times.resize(N + 1);
  for (std::size_t i = 0; i <= N; ++i) p.times[i] = mesh.at(i);
  p.y_path = simulate_factor(model, t0, y0, dt, seeds.brownian);

  const std::vector<double> jumps = simulate_jumps(model.theta, t0, T, seeds.poisson);
  std::vector<int> jump_count(N + 1, 0);
  for (double tau : jumps) {
    std::size_t i = static_cast<std::size_t>(std::ceil((tau - t0) / mesh.h - 1e-12));
    i = std::clamp<std::size_t>(i, 1, N);
    ++jump_count[i];
  }

  const bool darkpool = perturbation.kind != Perturbation::Kind::NoDarkpool;
  const double scale = perturbation.kind == Perturbation::Kind::ScaleXi ? perturbation.param : 1.0;
  const auto active = [&](double s) {
    return perturbation.kind != Perturbation::Kind::FreezeAfter || s < perturbation.param;
  };

  // node quantities that do not depend on the position: rate v/eta and dark-pool ratio v/(gamma+v)
  std::vector<double> rate(N), ratio(N);
  std::vector<CoefficientValues> coeffs(N + 1);
  const double field_end = value.last_time();
  for (std::size_t i = 0; i <= N; ++i) coeffs[i] = eval_coefficients(model, p.y_path[i]);
  for (std::size_t i = 0; i < N; ++i) {
    const double s = p.times[i];
    const CoefficientValues& c = coeffs[i];
    // past the meshed region use the leading terminal asymptotic eta/(T-s)
    const double v = s <= field_end ? value.value(s, p.y_path[i]) : c.eta / (T - s);
    rate[i] = v / c.eta;
    ratio[i] = c.gamma + v > 0.0 ? v / (c.gamma + v) : 0.0;
  }

  p.x_path.assign(N + 1, 0.0);
  p.xi_path.assign(N + 1, 0.0);
  p.mu_applied.assign(N + 1, 0.0);
  p.jump_flags.assign(N + 1, false);
  p.cost_cum.assign(N + 1, 0.0);

  const double theta = model.theta;
  const auto lit_factor = [&](std::size_t i) { return active(p.times[i]) ? scale : 0.0; };
  const auto dark_on = [&](std::size_t i) { return darkpool && active(p.times[i]); };
  const auto running_cost = [&](std::size_t i, double x) {
    const CoefficientValues& c = coeffs[i];
    const double xi = lit_factor(i) * rate[i] * x;
    const double mu = dark_on(i) ? ratio[i] * x : 0.0;
    return c.eta * xi * xi + theta * c.gamma * mu * mu + c.lambda * x * x;
  };

  p.x_path[0] = x0;
  p.xi_path[0] = lit_factor(0) * rate[0] * x0;
  double g_prev = running_cost(0, x0);
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const double exponent = 0.5 * mesh.h * (lit_factor(i) * rate[i] + lit_factor(i + 1) * rate[i + 1]);
    const double x_minus = p.x_path[i] * std::exp(-exponent);
    double x = x_minus;
    if (jump_count[i + 1] > 0) {
      p.jump_flags[i + 1] = true;
      if (dark_on(i + 1)) x = x_minus * std::pow(1.0 - ratio[i + 1], jump_count[i + 1]);
      p.mu_applied[i + 1] = x_minus - x;
    }
    p.x_path[i + 1] = x;
    p.xi_path[i + 1] = lit_factor(i + 1) * rate[i + 1] * x;
    const double g = running_cost(i + 1, x);
    p.cost_cum[i + 1] = p.cost_cum[i] + 0.5 * mesh.h * (g_prev + g);
    g_prev = g;
  }

  // last interval [T-h, T]: closed form under the rate c/(T-s), X(s) = X (T-s)^c / h^c
  const std::size_t L = N - 1;
  const double xL = p.x_path[L];
  const CoefficientValues& cL = coeffs[L];
  const double h = mesh.h;
  double tail = 0.0;
  if (active(p.times[L])) {
    const double c = scale;
    const double dark_weight = dark_on(L) ? theta * cL.gamma : 0.0;
    tail = cL.eta * c * c * xL * xL / ((2.0 * c - 1.0) * h) + (cL.lambda + dark_weight) * xL * xL * h / (2.0 * c + 1.0);
    p.x_path[N] = 0.0;
    p.xi_path[N] = c * xL / h;
    if (jump_count[N] > 0) {
      p.jump_flags[N] = true;
      if (dark_on(L)) {
        // first fill in the last interval clears what is left at that time
        const double tau = *std::find_if(jumps.begin(), jumps.end(), [&](double t) { return t > p.times[L]; });
        p.mu_applied[N] = xL * std::pow(std::max(0.0, (T - tau) / h), c);
      }
    }
  } else {
    tail = cL.lambda * xL * xL * h;
    p.x_path[N] = xL;
    p.jump_flags[N] = jump_count[N] > 0;
  }
  p.cost_cum[N] = p.cost_cum[L] + tail;
  return p;
}

CostEstimate summarize(std::span<const double> samples, std::uint64_t base_seed) {
  CostEstimate e;
  e.n_paths = samples.size();
  e.base_seed = base_seed;
  if (samples.empty()) return e;
  e.mean = pairwise_sum(samples) / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    std::vector<double> sq(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) sq[i] = (samples[i] - e.mean) * (samples[i] - e.mean);
    const double var = pairwise_sum(sq) / static_cast<double>(samples.size() - 1);
    e.std_error = std::sqrt(var / static_cast<double>(samples.size()));
  }
  return e;
}

CostEstimate monte_carlo(const ValueField& value, const ModelSpec& model, const McSetup& setup,
                         Perturbation perturbation) {
  if (setup.n_paths < 100) throw Error(ErrorCode::BadSimulationParams, "n_paths must be >= 100");
  const std::vector<double> costs = parallel_map<double>(setup.n_paths, setup.threads, [&](std::size_t i) {
    const PathSample p = simulate_policy(value, model, setup.t0, setup.y0, setup.x0, setup.dt,
                                         path_seeds(setup.base_seed, i), perturbation);
    return p.cost_cum.back();
  });
  return summarize(costs, setup.base_seed);
}

}  // namespace shjb
