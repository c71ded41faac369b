#include "shjb/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "shjb/error.hpp"

namespace shjb {

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_surface_csv(std::ostream& os, const ValueSurface& surface) {
  const Grid& g = surface.grid();
  os << "t,y,v,w\n";
  for (std::size_t k = 0; k < g.n_t(); ++k) {
    const std::string t = format_g17(g.t_nodes[k]);
    for (std::size_t j = 0; j < g.n_y(); ++j) {
      os << t << ',' << format_g17(g.y_nodes[j]) << ',' << format_g17(surface.at(k, j)) << ','
         << format_g17(surface.w_at(k, j)) << '\n';
    }
  }
}

namespace {

std::vector<double> split_numbers(const std::string& line, std::size_t expected) {
  std::vector<double> out;
  const char* p = line.c_str();
  while (*p) {
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p) throw Error(ErrorCode::Io, "malformed CSV number in: " + line);
    out.push_back(v);
    p = end;
    if (*p == ',') ++p;
    else if (*p && *p != '\r') throw Error(ErrorCode::Io, "malformed CSV line: " + line);
    else break;
  }
  if (out.size() != expected) throw Error(ErrorCode::Io, "wrong column count in: " + line);
  return out;
}

}  // namespace

ValueSurface read_surface_csv(std::istream& is, const ModelSpec& model) {
  std::string line;
  if (!std::getline(is, line) || (line != "t,y,v,w" && line != "t,y,v,w\r")) {
    throw Error(ErrorCode::Io, "surface CSV must start with header t,y,v,w");
  }
  std::vector<double> ts, ys, vs;
  bool first_block = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::vector<double> row = split_numbers(line, 4);
    if (ts.empty() || row[0] != ts.back()) {
      if (!ts.empty()) first_block = false;
      ts.push_back(row[0]);
    }
    if (first_block) ys.push_back(row[1]);
    vs.push_back(row[2]);
  }
  if (ts.size() < 3 || ys.size() < 3 || vs.size() != ts.size() * ys.size()) {
    throw Error(ErrorCode::Io, "surface CSV is not a full time x space grid");
  }
  Grid g;
  g.t_nodes = std::move(ts);
  g.y_nodes = std::move(ys);
  g.T = model.T;
  g.eps = model.T - g.t_nodes.back();
  g.grading_ratio = 1.0;
  return ValueSurface(std::move(g), std::move(vs), model.fingerprint());
}

void write_envelope_csv(std::ostream& os, const ValueSurface& surface, const ModelSpec& model,
                        const SupNorms& norms, double allowance) {
  const Grid& g = surface.grid();
  const double tol = 1e-8 + allowance;
  os << "t,y,v,check_v,hat_v,in_sandwich\n";
  for (std::size_t k = 0; k < g.n_t(); ++k) {
    const double t = g.t_nodes[k];
    if (!in_delta_window(norms, model.T, t)) continue;
    for (std::size_t j = 0; j < g.n_y(); ++j) {
      const double y = g.y_nodes[j];
      const double v = surface.at(k, j);
      const double lo = check_v(model, norms, t, y);
      const double hi = hat_v(model, norms, t, y);
      const bool inside = v >= lo * (1.0 - tol) && v <= hi * (1.0 + tol);
      os << format_g17(t) << ',' << format_g17(y) << ',' << format_g17(v) << ',' << format_g17(lo) << ','
         << format_g17(hi) << ',' << (inside ? 1 : 0) << '\n';
    }
  }
}

void write_ode_csv(std::ostream& os, const OdeTable& table) {
  os << "t,a\n";
  for (std::size_t i = 0; i < table.t_nodes.size(); ++i) {
    os << format_g17(table.t_nodes[i]) << ',' << format_g17(table.a_values[i]) << '\n';
  }
}

void write_paths_csv(std::ostream& os, const std::vector<std::pair<int, PathSample>>& paths) {
  os << "path_id,s,y,x,xi,mu,jump,cost_cum\n";
  for (const auto& [id, p] : paths) {
    for (std::size_t i = 0; i < p.times.size(); ++i) {
      os << id << ',' << format_g17(p.times[i]) << ',' << format_g17(p.y_path[i]) << ',' << format_g17(p.x_path[i])
         << ',' << format_g17(p.xi_path[i]) << ',' << format_g17(p.mu_applied[i]) << ','
         << (p.jump_flags[i] ? 1 : 0) << ',' << format_g17(p.cost_cum[i]) << '\n';
    }
  }
}

void write_estimates_csv(std::ostream& os, const std::vector<std::pair<std::string, CostEstimate>>& rows) {
  os << "label,mean,stderr,n_paths,seed\n";
  for (const auto& [label, e] : rows) {
    os << label << ',' << format_g17(e.mean) << ',' << format_g17(e.std_error) << ',' << e.n_paths << ','
       << e.base_seed << '\n';
  }
}

void write_report_csv(std::ostream& os, const std::vector<CheckResult>& checks) {
  os << "check,measured,threshold,pass,seed,runtime_ms\n";
  for (const CheckResult& c : checks) {
    char rt[32];
    std::snprintf(rt, sizeof rt, "%.1f", c.runtime_ms);
    os << c.name << ',' << format_g17(c.measured) << ',' << format_g17(c.threshold) << ',' << (c.pass ? 1 : 0) << ','
       << c.seed << ',' << rt << '\n';
  }
}

}  // namespace shjb
