#include "shjb/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "shjb/error.hpp"

namespace shjb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw Error(ErrorCode::TypeMismatch, key + " expects a real number, got '" + v + "'");
  }
  return out;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw Error(ErrorCode::TypeMismatch, key + " expects an integer, got '" + v + "'");
  }
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw Error(ErrorCode::TypeMismatch, key + " expects a comma-separated list");
  return out;
}

const char* const kCoefficientKeys[] = {"b0",       "b1",       "s0",      "s1",      "eta_c",
                                        "eta_p",    "lambda_c", "lambda_p", "gamma_c", "gamma_p"};

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const auto real = [](double& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = to_double(k, v); };
  };
  const auto opt_real = [](std::optional<double>& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = to_double(k, v); };
  };
  ModelOverrides& o = cfg.overrides;
  const std::map<std::string, Setter> setters = {
      {"model", [&](const std::string&, const std::string& v) { cfg.model = v; }},
      {"b0", opt_real(o.b0)}, {"b1", opt_real(o.b1)}, {"s0", opt_real(o.s0)}, {"s1", opt_real(o.s1)},
      {"eta_c", opt_real(o.eta_c)}, {"eta_p", opt_real(o.eta_p)},
      {"lambda_c", opt_real(o.lambda_c)}, {"lambda_p", opt_real(o.lambda_p)},
      {"gamma_c", opt_real(o.gamma_c)}, {"gamma_p", opt_real(o.gamma_p)},
      {"theta", opt_real(o.theta)}, {"T", opt_real(o.T)},
      {"y_min", real(cfg.y_min)}, {"y_max", real(cfg.y_max)},
      {"n_y", [&](const std::string& k, const std::string& v) { cfg.n_y = to_int<int>(k, v); }},
      {"n_t", [&](const std::string& k, const std::string& v) { cfg.n_t = to_int<int>(k, v); }},
      {"eps", opt_real(cfg.eps)},
      {"grading", real(cfg.grading)},
      {"layer",
       [&](const std::string& k, const std::string& v) {
         if (v == "leading") cfg.layer = LayerMode::Leading;
         else if (v == "envelope-geomean") cfg.layer = LayerMode::EnvelopeGeomean;
         else throw Error(ErrorCode::TypeMismatch, k + " must be 'leading' or 'envelope-geomean'");
       }},
      {"slack", real(cfg.slack)},
      {"ode_steps", [&](const std::string& k, const std::string& v) { cfg.ode_steps = to_int<int>(k, v); }},
      {"dt", real(cfg.dt)},
      {"n_paths", [&](const std::string& k, const std::string& v) { cfg.n_paths = to_int<std::size_t>(k, v); }},
      {"base_seed",
       [&](const std::string& k, const std::string& v) { cfg.base_seed = to_int<std::uint64_t>(k, v); }},
      {"t0", real(cfg.t0)},
      {"y0", [&](const std::string& k, const std::string& v) { cfg.y0 = to_list(k, v); }},
      {"x0", real(cfg.x0)},
      {"rel_tol", real(cfg.rel_tol)},
      {"threads", [&](const std::string& k, const std::string& v) { cfg.threads = to_int<unsigned>(k, v); }},
      {"out_dir", [&](const std::string&, const std::string& v) { cfg.out_dir = v; }},
      {"surface", [&](const std::string&, const std::string& v) { cfg.surface = v; }},
  };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::TypeMismatch, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw Error(ErrorCode::UnknownKey, "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw Error(ErrorCode::DuplicateKey, "key '" + key + "' given twice");
    if (value.empty()) throw Error(ErrorCode::TypeMismatch, "key '" + key + "' has no value");
    it->second(key, value);
  }

  if (!seen.count("model")) throw Error(ErrorCode::MissingRequired, "'model' is required");
  if (cfg.model == "custom") {
    for (const char* k : kCoefficientKeys) {
      if (!seen.count(k)) throw Error(ErrorCode::MissingRequired, std::string("custom model needs '") + k + "'");
    }
  }
  // surfaces model errors (unknown catalog name, invalid parameters) at parse time
  (void)cfg.model_spec();
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

ModelSpec RunConfig::model_spec() const {
  if (model != "custom") return build_model(model, overrides);
  ModelSpec m;
  m.name = "custom";
  const ModelOverrides& o = overrides;
  m.b0 = o.b0.value_or(0.0); m.b1 = o.b1.value_or(0.0);
  m.s0 = o.s0.value_or(0.0); m.s1 = o.s1.value_or(0.0);
  m.eta_c = o.eta_c.value_or(0.0); m.eta_p = o.eta_p.value_or(0.0);
  m.lambda_c = o.lambda_c.value_or(0.0); m.lambda_p = o.lambda_p.value_or(0.0);
  m.gamma_c = o.gamma_c.value_or(0.0); m.gamma_p = o.gamma_p.value_or(0.0);
  m.theta = o.theta.value_or(0.0);
  m.T = o.T.value_or(1.0);
  return build_model(m);
}

double RunConfig::resolved_eps() const { return eps.value_or(1e-3 * model_spec().T); }

std::vector<double> RunConfig::resolved_y0() const {
  if (!y0.empty()) return y0;
  if (model == "ex2") return {1.0, 3.0, 5.0};
  return {-1.0, 0.0, 1.0};
}

Grid RunConfig::grid() const {
  const ModelSpec m = model_spec();
  return build_grid(y_min, y_max, n_y, m.T, resolved_eps(), n_t, grading);
}

}  // namespace shjb
