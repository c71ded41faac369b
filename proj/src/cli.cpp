#include "shjb/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "shjb/csv.hpp"
#include "shjb/envelopes.hpp"
#include "shjb/odebench.hpp"
#include "shjb/pdesolver.hpp"
#include "shjb/simulator.hpp"
#include "shjb/verify.hpp"

namespace shjb {

namespace {

constexpr double kSeparableTol = 1e-2;
constexpr double kTerminalFraction = 0.05;

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::ofstream open_out(const RunConfig& cfg, const std::string& file) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory '" + cfg.out_dir + "'");
  const std::string path = (std::filesystem::path(cfg.out_dir) / file).string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  return f;
}

void close_out(std::ofstream& f, const std::string& what) {
  f.close();
  if (!f) throw Error(ErrorCode::Io, "failed writing " + what);
}

Interval domain_of(const RunConfig& cfg) { return {cfg.y_min, cfg.y_max}; }

ValueSurface obtain_surface(const RunConfig& cfg, const ModelSpec& model, const SupNorms& norms) {
  if (!cfg.surface.empty()) {
    std::ifstream f(cfg.surface, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot open surface '" + cfg.surface + "'");
    return read_surface_csv(f, model);
  }
  SolveOptions opts;
  opts.layer = cfg.layer;
  return solve(model, norms, cfg.grid(), opts);
}

McConfig mc_of(const RunConfig& cfg) {
  McConfig mc;
  mc.dt = cfg.dt;
  mc.n_paths = cfg.n_paths;
  mc.seed = cfg.base_seed;
  mc.threads = cfg.threads;
  return mc;
}

CheckResult sandwich_check(const ValueSurface& surface, const ModelSpec& model, const SupNorms& norms,
                           double slack, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const EnvelopeReport rep = sandwich_report(surface, model, norms, slack);
  CheckResult r;
  r.name = "sandwich";
  r.measured = static_cast<double>(rep.violations);
  r.threshold = 0.0;
  r.pass = rep.violations == 0;
  r.seed = seed;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu nodes; max rel violation %.3g", rep.nodes_checked, rep.max_rel_violation);
  r.detail = buf;
  r.runtime_ms = elapsed_ms(start);
  return r;
}

CheckResult separable_check(const ValueSurface& surface, const OdeTable& table, const ModelSpec& model,
                            std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const SeparableComparison cmp = separable_compare(surface, table, model);
  CheckResult r;
  r.name = "separable";
  r.measured = cmp.max_rel_error;
  r.threshold = kSeparableTol;
  r.pass = cmp.max_rel_error <= kSeparableTol;
  r.seed = seed;
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst at t=%g y=%g", cmp.at_t, cmp.at_y);
  r.detail = buf;
  r.runtime_ms = elapsed_ms(start);
  return r;
}

OdeTable ode_for(const RunConfig& cfg, const ModelSpec& model) {
  const std::optional<double> kappa = separable_kappa(model, domain_of(cfg));
  if (!kappa) throw Error(ErrorCode::NotSeparable, "model '" + model.name + "' has no separable reduction");
  return solve_a(model.theta, *kappa, model.T, cfg.resolved_eps(), cfg.ode_steps);
}

void log_checks(std::ostream& log, const std::vector<CheckResult>& checks) {
  for (const CheckResult& c : checks) {
    log << (c.pass ? "PASS " : "FAIL ") << c.name << " measured=" << format_g17(c.measured)
        << " threshold=" << format_g17(c.threshold);
    if (!c.detail.empty()) log << " (" << c.detail << ')';
    log << '\n';
  }
}

int finish(const RunConfig& cfg, const std::vector<CheckResult>& checks, std::ostream& log) {
  std::ofstream f = open_out(cfg, "report.csv");
  write_report_csv(f, checks);
  close_out(f, "report.csv");
  log_checks(log, checks);
  for (const CheckResult& c : checks) {
    if (!c.pass) return kExitCheckFailed;
  }
  return kExitPass;
}

int run_solve(const RunConfig& cfg, std::ostream& log) {
  const ModelSpec model = cfg.model_spec();
  const SupNorms norms = estimate_sup_norms(model, domain_of(cfg));
  const ValueSurface surface = obtain_surface(cfg, model, norms);
  {
    std::ofstream f = open_out(cfg, "surface.csv");
    write_surface_csv(f, surface);
    close_out(f, "surface.csv");
  }
  {
    std::ofstream f = open_out(cfg, "envelopes.csv");
    write_envelope_csv(f, surface, model, norms, cfg.slack);
    close_out(f, "envelopes.csv");
  }
  return finish(cfg, {sandwich_check(surface, model, norms, cfg.slack, cfg.base_seed)}, log);
}

int run_envelopes(const RunConfig& cfg, std::ostream&) {
  const ModelSpec model = cfg.model_spec();
  const SupNorms norms = estimate_sup_norms(model, domain_of(cfg));
  const ValueSurface surface = obtain_surface(cfg, model, norms);
  std::ofstream f = open_out(cfg, "envelopes.csv");
  write_envelope_csv(f, surface, model, norms, cfg.slack);
  close_out(f, "envelopes.csv");
  return kExitPass;
}

int run_benchmark(const RunConfig& cfg, std::ostream& log) {
  const ModelSpec model = cfg.model_spec();
  const OdeTable table = ode_for(cfg, model);
  {
    std::ofstream f = open_out(cfg, "ode.csv");
    write_ode_csv(f, table);
    close_out(f, "ode.csv");
  }
  const SupNorms norms = estimate_sup_norms(model, domain_of(cfg));
  const ValueSurface surface = obtain_surface(cfg, model, norms);
  return finish(cfg, {separable_check(surface, table, model, cfg.base_seed)}, log);
}

std::vector<std::pair<int, PathSample>> figure_paths(const ValueField& field, const ModelSpec& model,
                                                     const RunConfig& cfg, const std::vector<double>& y0s) {
  const SeedPair shared = path_seeds(cfg.base_seed, 0);
  std::vector<std::pair<int, PathSample>> out;
  for (std::size_t i = 0; i < y0s.size(); ++i) {
    out.emplace_back(static_cast<int>(i), simulate_policy(field, model, cfg.t0, y0s[i], cfg.x0, cfg.dt, shared));
  }
  return out;
}

int run_simulate(const RunConfig& cfg, std::ostream& log) {
  const ModelSpec model = cfg.model_spec();
  const Interval domain = domain_of(cfg);
  const SupNorms norms = estimate_sup_norms(model, domain);
  const ValueSurface surface = obtain_surface(cfg, model, norms);
  const SurfaceField field(surface);
  const std::vector<double> y0s = cfg.resolved_y0();

  const auto paths = figure_paths(field, model, cfg, y0s);
  {
    std::ofstream f = open_out(cfg, "paths.csv");
    write_paths_csv(f, paths);
    close_out(f, "paths.csv");
  }

  std::vector<std::pair<std::string, CostEstimate>> estimates;
  const McConfig mc = mc_of(cfg);
  for (double y0 : y0s) {
    McSetup setup;
    setup.t0 = cfg.t0;
    setup.y0 = y0;
    setup.x0 = cfg.x0;
    setup.dt = mc.dt;
    setup.n_paths = mc.n_paths;
    setup.base_seed = mc.seed;
    setup.threads = mc.threads;
    char label[48];
    std::snprintf(label, sizeof label, "y0=%g", y0);
    estimates.emplace_back(label, monte_carlo(field, model, setup));
  }
  {
    std::ofstream f = open_out(cfg, "estimates.csv");
    write_estimates_csv(f, estimates);
    close_out(f, "estimates.csv");
  }

  std::vector<CheckResult> checks;
  if (model.theta == 0.0) {
    // initial trading rate increasing in the starting factor value
    CheckResult r;
    r.name = "initial_rate_increasing";
    r.seed = cfg.base_seed;
    r.measured = INFINITY;
    bool sorted = true;
    for (std::size_t i = 1; i < y0s.size(); ++i) {
      sorted = sorted && y0s[i] > y0s[i - 1];
      r.measured = std::min(r.measured, paths[i].second.xi_path[0] - paths[i - 1].second.xi_path[0]);
    }
    if (sorted && y0s.size() > 1) {
      r.pass = r.measured > 0.0;
      checks.push_back(r);
    }
  } else {
    // the same factor/Poisson trajectory without the dark pool
    RunConfig lit = cfg;
    lit.overrides.theta = 0.0;
    lit.surface.clear();
    const ModelSpec lit_model = lit.model_spec();
    const SupNorms lit_norms = estimate_sup_norms(lit_model, domain);
    const ValueSurface lit_surface = obtain_surface(lit, lit_model, lit_norms);
    const SurfaceField lit_field(lit_surface);
    const auto lit_paths = figure_paths(lit_field, lit_model, cfg, y0s);
    {
      std::ofstream f = open_out(cfg, "paths_theta0.csv");
      write_paths_csv(f, lit_paths);
      close_out(f, "paths_theta0.csv");
    }
    CheckResult r;
    r.name = "darkpool_lowers_initial_rate";
    r.seed = cfg.base_seed;
    r.measured = -INFINITY;
    for (std::size_t i = 0; i < y0s.size(); ++i) {
      r.measured = std::max(r.measured, paths[i].second.xi_path[0] - lit_paths[i].second.xi_path[0]);
    }
    r.pass = r.measured < 0.0;
    checks.push_back(r);
  }
  return finish(cfg, checks, log);
}

int run_verify(const RunConfig& cfg, std::ostream& log) {
  const ModelSpec model = cfg.model_spec();
  const Interval domain = domain_of(cfg);
  const SupNorms norms = estimate_sup_norms(model, domain);
  const ValueSurface surface = obtain_surface(cfg, model, norms);
  const SurfaceField field(surface);
  const McConfig mc = mc_of(cfg);
  const std::vector<double> y0s = cfg.resolved_y0();
  const double y_mid = y0s[y0s.size() / 2];
  const double T = model.T;

  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, CostEstimate>> estimates;

  checks.push_back(sandwich_check(surface, model, norms, cfg.slack, cfg.base_seed));
  if (separable_kappa(model, domain)) {
    checks.push_back(separable_check(surface, ode_for(cfg, model), model, cfg.base_seed));
  }

  for (double y0 : y0s) {
    CostEstimate est;
    checks.push_back(verify_value(field, model, cfg.t0, y0, cfg.x0, mc, cfg.rel_tol, &est));
    char label[48];
    std::snprintf(label, sizeof label, "optimal(y0=%g)", y0);
    estimates.emplace_back(label, est);
  }

  std::vector<Perturbation> perturbations = {Perturbation::scale_xi(1.5)};
  if (model.theta > 0.0) perturbations.push_back(Perturbation::no_darkpool());
  checks.push_back(verify_suboptimality(field, model, cfg.t0, y_mid, cfg.x0, perturbations, mc, &estimates));

  McConfig liq = mc;
  liq.n_paths = std::min<std::size_t>(mc.n_paths, 1000);
  const auto start = std::chrono::steady_clock::now();
  const std::vector<PathSample> paths = simulate_batch(field, model, cfg.t0, y_mid, cfg.x0, liq);
  checks.push_back(verify_liquidation(paths, model, norms));
  {
    CheckResult r;
    r.name = "terminal_inventory";
    r.seed = liq.seed;
    for (const PathSample& p : paths) {
      r.measured = std::max(r.measured, std::abs(p.x_path[p.x_path.size() - 2]));
    }
    r.threshold = kTerminalFraction * std::abs(cfg.x0);
    r.pass = r.measured <= r.threshold;
    r.runtime_ms = elapsed_ms(start);
    checks.push_back(r);
  }

  for (const auto& [t, s] : {std::pair{0.1 * T, 0.5 * T}, std::pair{0.2 * T, 0.8 * T}}) {
    checks.push_back(verify_fbsde(field, model, t, s, y_mid, mc, cfg.rel_tol));
  }
  checks.push_back(
      verify_residual_cost(field, model, cfg.t0, y_mid, cfg.x0, {T - 0.1 * T, T - 0.05 * T, T - 0.01 * T}, mc));

  {
    std::ofstream f = open_out(cfg, "estimates.csv");
    write_estimates_csv(f, estimates);
    close_out(f, "estimates.csv");
  }
  return finish(cfg, checks, log);
}

}  // namespace

std::optional<Subcommand> parse_subcommand(std::string_view name) {
  if (name == "solve") return Subcommand::Solve;
  if (name == "benchmark") return Subcommand::Benchmark;
  if (name == "simulate") return Subcommand::Simulate;
  if (name == "verify") return Subcommand::Verify;
  if (name == "envelopes") return Subcommand::Envelopes;
  return std::nullopt;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownKey:
    case ErrorCode::DuplicateKey:
    case ErrorCode::TypeMismatch:
    case ErrorCode::MissingRequired:
    case ErrorCode::UnknownModel:
    case ErrorCode::NonPositiveEta:
    case ErrorCode::DegenerateDiffusion:
    case ErrorCode::NegativeIntensity:
    case ErrorCode::BadParameter:
    case ErrorCode::UnboundedRatio:
    case ErrorCode::BadGridParams:
    case ErrorCode::BadSimulationParams:
      return kExitConfig;
    case ErrorCode::Io:
      return kExitIo;
    default:
      return kExitNumerical;
  }
}

int run(Subcommand cmd, const RunConfig& cfg, std::ostream& log) {
  switch (cmd) {
    case Subcommand::Solve: return run_solve(cfg, log);
    case Subcommand::Benchmark: return run_benchmark(cfg, log);
    case Subcommand::Simulate: return run_simulate(cfg, log);
    case Subcommand::Verify: return run_verify(cfg, log);
    case Subcommand::Envelopes: return run_envelopes(cfg, log);
  }
  return kExitConfig;
}

}  // namespace shjb
