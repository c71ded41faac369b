#include "shjb/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "shjb/error.hpp"

namespace shjb {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::NonPositiveEta: return "NonPositiveEta";
    case ErrorCode::DegenerateDiffusion: return "DegenerateDiffusion";
    case ErrorCode::NegativeIntensity: return "NegativeIntensity";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::UnboundedRatio: return "UnboundedRatio";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::OutsideDeltaWindow: return "OutsideDeltaWindow";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::BadGridParams: return "BadGridParams";
    case ErrorCode::SingularTridiagonal: return "SingularTridiagonal";
    case ErrorCode::OutOfGrid: return "OutOfGrid";
    case ErrorCode::BlowupBackward: return "BlowupBackward";
    case ErrorCode::NotSeparable: return "NotSeparable";
    case ErrorCode::SurfaceGapError: return "SurfaceGapError";
    case ErrorCode::BadSimulationParams: return "BadSimulationParams";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::MissingRequired: return "MissingRequired";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

double power_family(double c, double p, double y) {
  if (p == 0.0) return c;
  return c * std::pow(1.0 + y * y, p);
}

double power_d1(double c, double p, double y) {
  if (p == 0.0) return 0.0;
  return c * p * 2.0 * y * std::pow(1.0 + y * y, p - 1.0);
}

double power_d2(double c, double p, double y) {
  if (p == 0.0) return 0.0;
  const double q = 1.0 + y * y;
  return c * (2.0 * p * std::pow(q, p - 1.0) + 4.0 * p * (p - 1.0) * y * y * std::pow(q, p - 2.0));
}

// Maximise f on [lo, hi] by dense sampling followed by golden-section refinement
// inside the bracket of the best sample. Returns (argmax, max, argmax_index).
struct SampledMax {
  double arg;
  double value;
  std::size_t index;
  bool rising_at_edge;
};

SampledMax sampled_max(const std::function<double(double)>& f, Interval d, int n) {
  const double h = (d.hi - d.lo) / (n - 1);
  std::vector<double> vals(static_cast<std::size_t>(n));
  std::size_t best = 0;
  for (int i = 0; i < n; ++i) {
    const double y = (i == n - 1) ? d.hi : d.lo + i * h;
    vals[static_cast<std::size_t>(i)] = f(y);
    if (vals[static_cast<std::size_t>(i)] > vals[best]) best = static_cast<std::size_t>(i);
  }
  SampledMax out{d.lo + best * h, vals[best], best, false};
  const std::size_t last = vals.size() - 1;
  if (best == 0 || best == last) {
    const std::size_t nb = best == 0 ? 1 : last - 1;
    out.rising_at_edge = vals[best] > vals[nb] * (1.0 + 1e-12) + 1e-300;
    if (best == last) out.arg = d.hi;
    return out;
  }
  // golden-section on [y_{best-1}, y_{best+1}]
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = d.lo + (best - 1) * h;
  double b = std::min(d.hi, d.lo + (best + 1) * h);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = f(x1);
    }
  }
  const double fm = std::max(f1, f2);
  if (fm > out.value) {
    out.value = fm;
    out.arg = f1 > f2 ? x1 : x2;
  }
  return out;
}

double growth_order(const std::function<double(double)>& f, Interval d) {
  const double edge = std::max(std::abs(d.lo), std::abs(d.hi));
  const double order = std::log(std::abs(f(edge)) / std::abs(f(0.5 * edge))) / std::log(2.0);
  return std::max(0.0, order);
}

}  // namespace

double ModelSpec::eta(double y) const { return power_family(eta_c, eta_p, y); }
double ModelSpec::lambda(double y) const { return power_family(lambda_c, lambda_p, y); }
double ModelSpec::gamma(double y) const { return power_family(gamma_c, gamma_p, y); }
double ModelSpec::sigma(double y) const { return std::sqrt(s0 + s1 * y * y); }

std::string ModelSpec::fingerprint() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%s|b=%.17g,%.17g|s=%.17g,%.17g|eta=%.17g,%.17g|lambda=%.17g,%.17g|gamma=%.17g,%.17g|"
                "theta=%.17g|T=%.17g",
                name.c_str(), b0, b1, s0, s1, eta_c, eta_p, lambda_c, lambda_p, gamma_c, gamma_p,
                theta, T);
  return buf;
}

ModelSpec build_model(const ModelSpec& raw) {
  const double all[] = {raw.b0,       raw.b1,      raw.s0,      raw.s1,      raw.eta_c, raw.eta_p,
                        raw.lambda_c, raw.lambda_p, raw.gamma_c, raw.gamma_p, raw.theta, raw.T};
  for (double v : all) {
    if (!std::isfinite(v)) throw Error(ErrorCode::BadParameter, "non-finite model parameter");
  }
  if (!(raw.eta_c > 0.0)) throw Error(ErrorCode::NonPositiveEta, "eta_c must be > 0");
  if (!(raw.s0 > 0.0)) throw Error(ErrorCode::DegenerateDiffusion, "s0 must be > 0");
  if (raw.s1 < 0.0) throw Error(ErrorCode::DegenerateDiffusion, "s1 must be >= 0");
  if (raw.theta < 0.0) throw Error(ErrorCode::NegativeIntensity, "theta must be >= 0");
  if (raw.lambda_c < 0.0 || raw.gamma_c < 0.0)
    throw Error(ErrorCode::BadParameter, "lambda_c and gamma_c must be >= 0");
  if (!(raw.T > 0.0)) throw Error(ErrorCode::BadParameter, "horizon T must be > 0");
  return raw;
}

ModelSpec build_model(std::string_view name, const ModelOverrides& o) {
  ModelSpec m;
  m.name = std::string(name);
  m.T = 1.0;
  if (name == "ex1a") {
    m.b0 = 0.0; m.b1 = 0.5; m.s0 = 1.0; m.s1 = 0.0;
    m.eta_c = 1.0; m.eta_p = 1.0;
    m.lambda_c = 1.0; m.lambda_p = 1.0;
    m.gamma_c = 1.0; m.gamma_p = 1.0;
    m.theta = 2.0;
  } else if (name == "ex1b") {
    m.b0 = 0.0; m.b1 = 1.0; m.s0 = 1.0; m.s1 = 1.0;
    m.eta_c = 1.0; m.eta_p = -1.0;
    m.lambda_c = 1.0; m.lambda_p = -1.0;
    m.gamma_c = 1.0; m.gamma_p = -1.0;
    m.theta = 2.0;
  } else if (name == "ex2") {
    m.b0 = 5.0; m.b1 = -1.0; m.s0 = 1.0; m.s1 = 0.0;
    m.eta_c = 1.0; m.eta_p = -1.0;
    m.lambda_c = 1.0; m.lambda_p = -1.0;
    m.gamma_c = 1.0; m.gamma_p = 0.0;
    m.theta = 5.0;
  } else {
    throw Error(ErrorCode::UnknownModel, "no catalog entry named '" + std::string(name) + "'");
  }
  auto apply = [](double& field, const std::optional<double>& v) {
    if (v) field = *v;
  };
  apply(m.b0, o.b0); apply(m.b1, o.b1); apply(m.s0, o.s0); apply(m.s1, o.s1);
  apply(m.eta_c, o.eta_c); apply(m.eta_p, o.eta_p);
  apply(m.lambda_c, o.lambda_c); apply(m.lambda_p, o.lambda_p);
  apply(m.gamma_c, o.gamma_c); apply(m.gamma_p, o.gamma_p);
  apply(m.theta, o.theta); apply(m.T, o.T);
  return build_model(m);
}

double generator_of_power(const ModelSpec& model, double c, double p, double y) {
  const double s2 = model.s0 + model.s1 * y * y;
  return 0.5 * s2 * power_d2(c, p, y) + model.drift(y) * power_d1(c, p, y);
}

CoefficientValues eval_coefficients(const ModelSpec& model, double y) {
  CoefficientValues c;
  c.eta = model.eta(y);
  c.lambda = model.lambda(y);
  c.gamma = model.gamma(y);
  c.b = model.drift(y);
  c.sigma = model.sigma(y);
  c.L_eta = generator_of_power(model, model.eta_c, model.eta_p, y);
  return c;
}

SupNorms estimate_sup_norms(const ModelSpec& model, Interval domain, int n_samples, double ratio_cap) {
  if (n_samples < 1000) throw Error(ErrorCode::BadParameter, "n_samples must be >= 1000");
  if (!(domain.lo < domain.hi)) throw Error(ErrorCode::BadParameter, "empty y domain");

  const auto m_fn = [&](double y) { return std::abs(eval_coefficients(model, y).L_eta / model.eta(y)); };
  const auto l_fn = [&](double y) { return model.lambda(y) / model.eta(y); };
  const SampledMax m = sampled_max(m_fn, domain, n_samples);
  const SampledMax l = sampled_max(l_fn, domain, n_samples);
  if (!(m.value <= ratio_cap) || !(l.value <= ratio_cap)) {
    throw Error(ErrorCode::UnboundedRatio, "sampled ratio exceeds cap");
  }

  SupNorms n;
  n.m_ratio = m.value;
  n.l_ratio = l.value;
  n.delta = n.m_ratio > 0.0 ? std::min(1.0 / n.m_ratio, model.T) : model.T;
  n.k_prime = n.m_ratio + 1.0;
  n.c0 = 0.5 * (n.m_ratio + std::sqrt(n.m_ratio * n.m_ratio + 4.0 * n.l_ratio));
  n.c_tilde = std::max(n.c0, 1.0 / n.delta + n.m_ratio + std::exp(n.k_prime * model.T) * n.l_ratio);
  n.edge_warning = m.rising_at_edge || l.rising_at_edge;

  const auto order = [&](double c, double p) {
    return growth_order([&](double y) { return power_family(c, p, y); }, domain);
  };
  const double g = std::max({order(model.eta_c, model.eta_p), order(model.lambda_c, model.lambda_p),
                             order(model.gamma_c, model.gamma_p)});
  n.growth_m = static_cast<int>(std::lround(g));
  return n;
}

AssumptionReport validate_assumptions(const ModelSpec& model, Interval domain) {
  AssumptionReport r;
  r.lipschitz_b = std::abs(model.b1);
  // |sigma'(y)| = s1*|y| / sigma(y), increasing in |y|
  const double edge = std::max(std::abs(domain.lo), std::abs(domain.hi));
  r.lipschitz_sigma = model.s1 * edge / model.sigma(edge);

  const auto order = [&](double c, double p) {
    return growth_order([&](double y) { return power_family(c, p, y); }, domain);
  };
  r.growth_eta = order(model.eta_c, model.eta_p);
  r.growth_lambda = model.lambda_c > 0.0 ? order(model.lambda_c, model.lambda_p) : 0.0;
  r.growth_gamma = model.gamma_c > 0.0 ? order(model.gamma_c, model.gamma_p) : 0.0;
  r.growth_inv_eta = order(1.0 / model.eta_c, -model.eta_p);
  r.growth_m = static_cast<int>(std::lround(std::max({r.growth_eta, r.growth_lambda, r.growth_gamma})));

  try {
    const SupNorms n = estimate_sup_norms(model, domain, 10001);
    const auto m_fn = [&](double y) { return std::abs(eval_coefficients(model, y).L_eta / model.eta(y)); };
    const auto l_fn = [&](double y) { return model.lambda(y) / model.eta(y); };
    r.L_eta_ratio_bounded = !sampled_max(m_fn, domain, 10001).rising_at_edge && std::isfinite(n.m_ratio);
    r.lambda_ratio_bounded = !sampled_max(l_fn, domain, 10001).rising_at_edge && std::isfinite(n.l_ratio);
  } catch (const Error&) {
    r.L_eta_ratio_bounded = false;
    r.lambda_ratio_bounded = false;
  }
  r.passes = std::isfinite(r.lipschitz_b) && std::isfinite(r.lipschitz_sigma) && r.L_eta_ratio_bounded &&
             r.lambda_ratio_bounded;
  return r;
}

std::optional<double> separable_kappa(const ModelSpec& model, Interval domain, int n_samples) {
  const double kappa = eval_coefficients(model, 0.0).L_eta / model.eta(0.0);
  const double h = (domain.hi - domain.lo) / (n_samples - 1);
  for (int i = 0; i < n_samples; ++i) {
    const double y = domain.lo + i * h;
    const CoefficientValues c = eval_coefficients(model, y);
    const double tol = 1e-10 * std::max(1.0, std::abs(c.eta));
    if (std::abs(c.L_eta - kappa * c.eta) > tol * std::max(1.0, std::abs(kappa))) return std::nullopt;
    if (std::abs(c.lambda - c.eta) > tol || std::abs(c.gamma - c.eta) > tol) return std::nullopt;
  }
  return kappa;
}

}  // namespace shjb
