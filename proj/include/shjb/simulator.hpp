#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shjb/model.hpp"
#include "shjb/odebench.hpp"
#include "shjb/pdesolver.hpp"

namespace shjb {

/// Read-only access to a value factor v(t,y) on [t_start, last_time()].
class ValueField {
 public:
  virtual ~ValueField() = default;
  /// Throws SurfaceGapError when (t,y) cannot be evaluated.
  virtual double value(double t, double y) const = 0;
  virtual double last_time() const = 0;
};

/// Wraps a solved surface. The surface must outlive the field.
class SurfaceField final : public ValueField {
 public:
  explicit SurfaceField(const ValueSurface& surface) : surface_(surface) {}
  double value(double t, double y) const override;
  double last_time() const override { return surface_.grid().t_nodes.back(); }

 private:
  const ValueSurface& surface_;
};

/// a(t) * eta(y) from an ODE table. The table must outlive the field.
class SeparableField final : public ValueField {
 public:
  SeparableField(const OdeTable& table, ModelSpec model) : table_(table), model_(std::move(model)) {}
  double value(double t, double y) const override;
  double last_time() const override { return table_.t_nodes.back(); }

 private:
  const OdeTable& table_;
  ModelSpec model_;
};

struct SeedPair {
  std::uint64_t brownian = 0;
  std::uint64_t poisson = 0;
};

SeedPair path_seeds(std::uint64_t base_seed, std::uint64_t path_index);

struct Perturbation {
  enum class Kind { None, ScaleXi, NoDarkpool, FreezeAfter };
  Kind kind = Kind::None;
  double param = 1.0;

  static Perturbation none() { return {}; }
  /// xi multiplied by c; c must exceed 1/2 for the terminal cost to stay finite.
  static Perturbation scale_xi(double c) { return {Kind::ScaleXi, c}; }
  static Perturbation no_darkpool() { return {Kind::NoDarkpool, 0.0}; }
  /// All trading stops after time t (non-liquidating).
  static Perturbation freeze_after(double t) { return {Kind::FreezeAfter, t}; }

  std::string label() const;
};

/// Uniform mesh t0 + i*h, i = 0..steps, with h = (t_end - t0)/steps closest to dt.
struct TimeMesh {
  double t0 = 0.0;
  double h = 0.0;
  std::size_t steps = 0;
  double at(std::size_t i) const { return i == steps ? t_end : t0 + static_cast<double>(i) * h; }
  double t_end = 0.0;
};

TimeMesh make_mesh(double t0, double t_end, double dt);

/// Euler-Maruyama factor path on make_mesh(t0, t_end, dt); t_end defaults to T.
std::vector<double> simulate_factor(const ModelSpec& model, double t0, double y0, double dt,
                                    std::uint64_t brownian_seed, double t_end = -1.0);

/// Poisson(theta) event times in (t0, T], ascending.
std::vector<double> simulate_jumps(double theta, double t0, double T, std::uint64_t poisson_seed);

struct PathSample {
  std::vector<double> times;
  std::vector<double> y_path;
  std::vector<double> x_path;
  std::vector<double> xi_path;
  std::vector<double> mu_applied;
  std::vector<bool> jump_flags;
  std::vector<double> cost_cum;
  SeedPair seeds;
};

PathSample simulate_policy(const ValueField& value, const ModelSpec& model, double t0, double y0, double x0,
                           double dt, SeedPair seeds, Perturbation perturbation = {});

struct CostEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t base_seed = 0;
};

struct McSetup {
  double t0 = 0.0;
  double y0 = 0.0;
  double x0 = 1.0;
  double dt = 1e-3;
  std::size_t n_paths = 10000;
  std::uint64_t base_seed = 1;
  unsigned threads = 0;  // 0 = hardware concurrency
};

CostEstimate monte_carlo(const ValueField& value, const ModelSpec& model, const McSetup& setup,
                         Perturbation perturbation = {});

/// Mean and standard error of a sample, using pairwise summation.
CostEstimate summarize(std::span<const double> samples, std::uint64_t base_seed);

}  // namespace shjb
