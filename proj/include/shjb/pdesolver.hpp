#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "shjb/model.hpp"

namespace shjb {

/// Space-time mesh on [0, T - eps] x [y_min, y_max]. Time steps may be graded
/// geometrically so that the smallest step sits next to the terminal layer.
struct Grid {
  std::vector<double> t_nodes;
  std::vector<double> y_nodes;
  double T = 1.0;
  double eps = 1e-3;
  double grading_ratio = 1.0;

  std::size_t n_t() const { return t_nodes.size(); }
  std::size_t n_y() const { return y_nodes.size(); }
  double dy() const { return y_nodes[1] - y_nodes[0]; }
};

/// n_y is the number of spatial nodes, n_t the number of time steps (n_t + 1 nodes).
Grid build_grid(double y_min, double y_max, int n_y, double T, double eps, int n_t, double grading_ratio = 1.0);

enum class LayerMode {
  Leading,          // v(T-eps, y) = eta(y)/eps
  EnvelopeGeomean,  // sqrt(check_v * hat_v) at T-eps
};

std::vector<double> terminal_layer(const ModelSpec& model, const SupNorms& norms, const Grid& grid,
                                   LayerMode mode = LayerMode::Leading);

/// Grid-sampled value factor v(t,y), stored row-major by time then space.
class ValueSurface {
 public:
  ValueSurface() = default;
  ValueSurface(Grid grid, std::vector<double> values, std::string fingerprint);

  const Grid& grid() const { return grid_; }
  const std::string& fingerprint() const { return fingerprint_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> slice(std::size_t k) const;

  double at(std::size_t k, std::size_t j) const { return values_[k * grid_.n_y() + j]; }
  double w_at(std::size_t k, std::size_t j) const { return (grid_.T - grid_.t_nodes[k]) * at(k, j); }

  /// Bilinear interpolation; exact at nodes. Throws OutOfGrid outside the hull.
  double eval(double t, double y) const;
  double w(double t, double y) const { return (grid_.T - t) * eval(t, y); }

  std::size_t clamped_nodes = 0;

 private:
  Grid grid_;
  std::vector<double> values_;
  std::string fingerprint_;
};

struct StepResult {
  std::vector<double> slice;
  std::size_t clamped = 0;
};

/// One backward step t_{k+1} -> t_k of the semi-implicit monotone scheme.
StepResult step_backward(const ModelSpec& model, std::span<const double> slice_next, double t_k,
                         double t_k1, const Grid& grid);

struct SolveOptions {
  LayerMode layer = LayerMode::Leading;
};

ValueSurface solve(const ModelSpec& model, const SupNorms& norms, const Grid& grid, SolveOptions opts = {});

/// Centered-difference residual of -v_t - Lv - F(y,v) at interior nodes.
struct ResidualField {
  std::vector<std::size_t> t_index;
  std::vector<std::size_t> y_index;
  std::vector<double> values;  // row-major [t_index.size()][y_index.size()]

  double at(std::size_t r, std::size_t c) const { return values[r * y_index.size() + c]; }
};

ResidualField pde_residual(const ValueSurface& surface, const ModelSpec& model);

}  // namespace shjb
