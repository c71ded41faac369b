#include "shjb/pdesolver.hpp"

#include <algorithm>
#include <cmath>

#include "shjb/envelopes.hpp"
#include "shjb/error.hpp"
#include "shjb/hamiltonian.hpp"

namespace shjb {

Grid build_grid(double y_min, double y_max, int n_y, double T, double eps, int n_t, double grading_ratio) {
  if (!(y_min < y_max)) throw Error(ErrorCode::BadGridParams, "y_min must be < y_max");
  if (!(T > 0.0)) throw Error(ErrorCode::BadGridParams, "T must be > 0");
  if (!(eps > 0.0) || eps > T / 10.0) throw Error(ErrorCode::BadGridParams, "eps must lie in (0, T/10]");
  if (n_y < 3 || n_t < 3) throw Error(ErrorCode::BadGridParams, "need at least 3 nodes per axis");
  if (!(grading_ratio >= 1.0) || !std::isfinite(grading_ratio))
    throw Error(ErrorCode::BadGridParams, "grading_ratio must be >= 1");

  Grid g;
  g.T = T;
  g.eps = eps;
  g.grading_ratio = grading_ratio;

  const double t_end = T - eps;
  g.t_nodes.resize(static_cast<std::size_t>(n_t) + 1);
  if (grading_ratio == 1.0) {
    for (int i = 0; i <= n_t; ++i) g.t_nodes[static_cast<std::size_t>(i)] = t_end * i / n_t;
  } else {
    // step i (from t=0) is h_min * r^(n_t-1-i)
    const double r = grading_ratio;
    const double h_min = t_end * (r - 1.0) / std::expm1(n_t * std::log(r));
    g.t_nodes[0] = 0.0;
    for (int i = 0; i < n_t; ++i) {
      const double h = h_min * std::pow(r, n_t - 1 - i);
      g.t_nodes[static_cast<std::size_t>(i) + 1] = g.t_nodes[static_cast<std::size_t>(i)] + h;
    }
  }
  g.t_nodes.back() = t_end;

  g.y_nodes.resize(static_cast<std::size_t>(n_y));
  const double dy = (y_max - y_min) / (n_y - 1);
  for (int j = 0; j < n_y; ++j) g.y_nodes[static_cast<std::size_t>(j)] = y_min + j * dy;
  g.y_nodes.back() = y_max;
  return g;
}

std::vector<double> terminal_layer(const ModelSpec& model, const SupNorms& norms, const Grid& grid,
                                   LayerMode mode) {
  std::vector<double> layer(grid.n_y());
  const double t = grid.t_nodes.back();
  for (std::size_t j = 0; j < grid.n_y(); ++j) {
    const double y = grid.y_nodes[j];
    if (mode == LayerMode::Leading) {
      layer[j] = model.eta(y) / grid.eps;
    } else {
      layer[j] = std::sqrt(check_v(model, norms, t, y) * hat_v(model, norms, t, y));
    }
  }
  return layer;
}

ValueSurface::ValueSurface(Grid grid, std::vector<double> values, std::string fingerprint)
    : grid_(std::move(grid)), values_(std::move(values)), fingerprint_(std::move(fingerprint)) {
  if (values_.size() != grid_.n_t() * grid_.n_y())
    throw Error(ErrorCode::BadGridParams, "surface size does not match grid");
}

std::span<const double> ValueSurface::slice(std::size_t k) const {
  return std::span<const double>(values_).subspan(k * grid_.n_y(), grid_.n_y());
}

namespace {

// Index i with nodes[i] <= x <= nodes[i+1]; x is assumed inside the hull.
std::size_t bracket(const std::vector<double>& nodes, double x) {
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  std::size_t i = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
  return std::min(i, nodes.size() - 2);
}

}  // namespace

double ValueSurface::eval(double t, double y) const {
  const auto& tn = grid_.t_nodes;
  const auto& yn = grid_.y_nodes;
  const double t_tol = 1e-12 * grid_.T;
  const double y_tol = 1e-12 * (yn.back() - yn.front());
  if (!(t >= tn.front() - t_tol && t <= tn.back() + t_tol) || !(y >= yn.front() - y_tol && y <= yn.back() + y_tol)) {
    throw Error(ErrorCode::OutOfGrid, "query outside the surface grid");
  }
  t = std::clamp(t, tn.front(), tn.back());
  y = std::clamp(y, yn.front(), yn.back());
  const std::size_t k = bracket(tn, t);
  const std::size_t j = bracket(yn, y);
  const double a = (t - tn[k]) / (tn[k + 1] - tn[k]);
  const double b = (y - yn[j]) / (yn[j + 1] - yn[j]);
  const double v00 = at(k, j), v01 = at(k, j + 1), v10 = at(k + 1, j), v11 = at(k + 1, j + 1);
  return (1.0 - a) * ((1.0 - b) * v00 + b * v01) + a * ((1.0 - b) * v10 + b * v11);
}

namespace {

// Spatial coefficients of the scheme, fixed for a given model and grid.
struct Stencil {
  std::vector<double> diff;  // sigma^2 / (2 dy^2)
  std::vector<double> up;    // max(b,0)/dy
  std::vector<double> down;  // max(-b,0)/dy
  std::vector<CoefficientValues> coeffs;

  Stencil(const ModelSpec& model, const Grid& grid) {
    const std::size_t n = grid.n_y();
    const double dy = grid.dy();
    diff.resize(n); up.resize(n); down.resize(n); coeffs.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const CoefficientValues c = eval_coefficients(model, grid.y_nodes[j]);
      coeffs[j] = c;
      diff[j] = 0.5 * c.sigma * c.sigma / (dy * dy);
      up[j] = std::max(c.b, 0.0) / dy;
      down[j] = std::max(-c.b, 0.0) / dy;
    }
  }
};

StepResult step_with(const Stencil& st, double theta, std::span<const double> next, double dt) {
  const std::size_t n = next.size();
  std::vector<double> lower(n, 0.0), diag(n), upper(n, 0.0), rhs(n);
  StepResult out;

  for (std::size_t j = 0; j < n; ++j) {
    const CoefficientValues& c = st.coeffs[j];
    const double vn = next[j];
    if (vn < 0.0 || !std::isfinite(vn)) throw Error(ErrorCode::NegativeValue, "slice_next must be finite and >= 0");
    const double darkpool = c.gamma > 0.0 ? theta * c.gamma * vn / (c.gamma + vn) : 0.0;
    rhs[j] = vn * (1.0 - theta * dt) + dt * (c.lambda + darkpool);
    // -v^2/eta linearised as -v_k * v_{k+1} / eta, kept implicit
    diag[j] = 1.0 + dt * vn / c.eta;

    if (j == 0 || j == n - 1) {
      // v/eta taken locally flat at the edge, so L v = (L eta / eta) v; growth explicit, decay implicit
      const double ratio = c.L_eta / c.eta;
      if (ratio >= 0.0) rhs[j] += dt * ratio * vn;
      else diag[j] -= dt * ratio;
    } else {
      lower[j] = -dt * (st.diff[j] + st.down[j]);
      upper[j] = -dt * (st.diff[j] + st.up[j]);
      diag[j] += dt * (2.0 * st.diff[j] + st.up[j] + st.down[j]);
    }
    if (!(std::abs(diag[j]) > std::abs(lower[j]) + std::abs(upper[j]))) {
      throw Error(ErrorCode::SingularTridiagonal, "diagonal dominance lost; reduce the time step");
    }
  }

  // Thomas algorithm
  std::vector<double> c_star(n), d_star(n);
  c_star[0] = upper[0] / diag[0];
  d_star[0] = rhs[0] / diag[0];
  for (std::size_t j = 1; j < n; ++j) {
    const double m = diag[j] - lower[j] * c_star[j - 1];
    if (m == 0.0 || !std::isfinite(m)) throw Error(ErrorCode::SingularTridiagonal, "zero pivot");
    c_star[j] = upper[j] / m;
    d_star[j] = (rhs[j] - lower[j] * d_star[j - 1]) / m;
  }
  out.slice.assign(n, 0.0);
  out.slice[n - 1] = d_star[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) out.slice[j] = d_star[j] - c_star[j] * out.slice[j + 1];

  for (double& v : out.slice) {
    if (v < 0.0) {
      v = 0.0;
      ++out.clamped;
    }
  }
  return out;
}

}  // namespace

StepResult step_backward(const ModelSpec& model, std::span<const double> slice_next, double t_k, double t_k1,
                         const Grid& grid) {
  if (slice_next.size() != grid.n_y()) throw Error(ErrorCode::BadGridParams, "slice size mismatch");
  if (!(t_k1 > t_k)) throw Error(ErrorCode::BadGridParams, "t_{k+1} must exceed t_k");
  const Stencil st(model, grid);
  return step_with(st, model.theta, slice_next, t_k1 - t_k);
}

ValueSurface solve(const ModelSpec& model, const SupNorms& norms, const Grid& grid, SolveOptions opts) {
  const std::size_t nt = grid.n_t();
  const std::size_t ny = grid.n_y();
  std::vector<double> values(nt * ny);
  const std::vector<double> layer = terminal_layer(model, norms, grid, opts.layer);
  std::copy(layer.begin(), layer.end(), values.begin() + static_cast<std::ptrdiff_t>((nt - 1) * ny));

  const Stencil st(model, grid);
  std::size_t clamped = 0;
  for (std::size_t k = nt - 1; k-- > 0;) {
    const std::span<const double> next(values.data() + (k + 1) * ny, ny);
    StepResult r = step_with(st, model.theta, next, grid.t_nodes[k + 1] - grid.t_nodes[k]);
    std::copy(r.slice.begin(), r.slice.end(), values.begin() + static_cast<std::ptrdiff_t>(k * ny));
    clamped += r.clamped;
  }
  ValueSurface s(grid, std::move(values), model.fingerprint());
  s.clamped_nodes = clamped;
  return s;
}

ResidualField pde_residual(const ValueSurface& surface, const ModelSpec& model) {
  const Grid& g = surface.grid();
  ResidualField r;
  const std::size_t nt = g.n_t(), ny = g.n_y();
  if (nt < 5 || ny < 5) return r;
  for (std::size_t k = 1; k + 3 <= nt; ++k) r.t_index.push_back(k);
  for (std::size_t j = 2; j + 2 < ny; ++j) r.y_index.push_back(j);
  r.values.reserve(r.t_index.size() * r.y_index.size());

  const double dy = g.dy();
  std::vector<CoefficientValues> coeffs(ny);
  for (std::size_t j = 0; j < ny; ++j) coeffs[j] = eval_coefficients(model, g.y_nodes[j]);

  for (std::size_t k : r.t_index) {
    const double hm = g.t_nodes[k] - g.t_nodes[k - 1];
    const double hp = g.t_nodes[k + 1] - g.t_nodes[k];
    for (std::size_t j : r.y_index) {
      const CoefficientValues& c = coeffs[j];
      const double vm = surface.at(k - 1, j), v0 = surface.at(k, j), vp = surface.at(k + 1, j);
      const double v_t = (hm * hm * vp - hp * hp * vm + (hp * hp - hm * hm) * v0) / (hp * hm * (hp + hm));
      const double vl = surface.at(k, j - 1), vr = surface.at(k, j + 1);
      const double v_yy = (vr - 2.0 * v0 + vl) / (dy * dy);
      const double v_y = (vr - vl) / (2.0 * dy);
      const double Lv = 0.5 * c.sigma * c.sigma * v_yy + c.b * v_y;
      r.values.push_back(-v_t - Lv - nonlinearity_F(c, v0, model.theta));
    }
  }
  return r;
}

}  // namespace shjb
