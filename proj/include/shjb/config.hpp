#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shjb/model.hpp"
#include "shjb/pdesolver.hpp"

namespace shjb {

/// Everything a CLI run needs. Parsed from a flat `key = value` file.
struct RunConfig {
  std::string model = "ex2";
  ModelOverrides overrides;

  // grid
  double y_min = -10.0;
  double y_max = 10.0;
  int n_y = 401;
  int n_t = 2000;
  std::optional<double> eps;  // default 1e-3 * T
  double grading = 1.0;
  LayerMode layer = LayerMode::Leading;
  double slack = 1e-2;

  // benchmark
  int ode_steps = 20000;

  // simulation
  double dt = 1e-3;
  std::size_t n_paths = 10000;
  std::uint64_t base_seed = 20190101;
  double t0 = 0.0;
  std::vector<double> y0;  // empty: per-model default
  double x0 = 1.0;
  double rel_tol = 2e-2;
  unsigned threads = 0;

  std::string out_dir = ".";
  std::string surface;  // optional surface CSV to load instead of solving

  ModelSpec model_spec() const;
  double resolved_eps() const;
  std::vector<double> resolved_y0() const;
  Grid grid() const;
};

/// Parses the text of a config file. Errors: UnknownKey, DuplicateKey,
/// TypeMismatch, MissingRequired, and model errors from build_model.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

}  // namespace shjb
