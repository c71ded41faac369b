#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace shjb {

/// Closed interval on the factor axis.
struct Interval {
  double lo = -10.0;
  double hi = 10.0;
};

/// One entry of the coefficient family
///   b(y) = b0 + b1*y,  sigma(y) = sqrt(s0 + s1*y^2),
///   eta(y) = eta_c*(1+y^2)^eta_p  (lambda, gamma analogous),
/// plus the dark-pool intensity theta and the horizon T.
struct ModelSpec {
  std::string name = "custom";
  double b0 = 0.0;
  double b1 = 0.0;
  double s0 = 1.0;
  double s1 = 0.0;
  double eta_c = 1.0;
  double eta_p = 0.0;
  double lambda_c = 0.0;
  double lambda_p = 0.0;
  double gamma_c = 0.0;
  double gamma_p = 0.0;
  double theta = 0.0;
  double T = 1.0;

  double eta(double y) const;
  double lambda(double y) const;
  double gamma(double y) const;
  double drift(double y) const { return b0 + b1 * y; }
  double sigma(double y) const;

  /// Stable text identity of the parameter set, used to tag solved surfaces.
  std::string fingerprint() const;
};

/// Optional overrides applied on top of a catalog entry.
struct ModelOverrides {
  std::optional<double> b0, b1, s0, s1;
  std::optional<double> eta_c, eta_p, lambda_c, lambda_p, gamma_c, gamma_p;
  std::optional<double> theta, T;
};

/// Catalog lookup: "ex1a", "ex1b", "ex2". Throws UnknownModel otherwise.
ModelSpec build_model(std::string_view name, const ModelOverrides& overrides = {});

/// Validates a raw parameter set; returns it unchanged on success.
ModelSpec build_model(const ModelSpec& raw);

/// Coefficients at a single factor value. L_eta is the generator applied to eta.
struct CoefficientValues {
  double eta = 1.0;
  double lambda = 0.0;
  double gamma = 0.0;
  double b = 0.0;
  double sigma = 1.0;
  double L_eta = 0.0;
};

CoefficientValues eval_coefficients(const ModelSpec& model, double y);

/// Generator of the factor process applied to c*(1+y^2)^p, analytic derivatives.
double generator_of_power(const ModelSpec& model, double c, double p, double y);

/// Derived constants governing envelopes and a-priori bounds.
struct SupNorms {
  double m_ratio = 0.0;  // sup |L eta / eta|
  double l_ratio = 0.0;  // sup lambda / eta
  double delta = 0.0;    // min(1/m_ratio, T)
  double k_prime = 1.0;  // m_ratio + 1
  double c0 = 0.0;       // positive root of c^2 - c*m_ratio - l_ratio
  double c_tilde = 0.0;  // max(c0, 1/delta + m_ratio + exp(k_prime*T)*l_ratio)
  int growth_m = 0;
  bool edge_warning = false;  // a sampled sup is attained at, and still rising toward, the domain edge
};

SupNorms estimate_sup_norms(const ModelSpec& model, Interval domain, int n_samples = 100001,
                            double ratio_cap = 1e6);

struct AssumptionReport {
  double lipschitz_b = 0.0;
  double lipschitz_sigma = 0.0;
  double growth_eta = 0.0;
  double growth_lambda = 0.0;
  double growth_gamma = 0.0;
  double growth_inv_eta = 0.0;
  int growth_m = 0;
  bool L_eta_ratio_bounded = true;
  bool lambda_ratio_bounded = true;
  bool passes = true;
};

AssumptionReport validate_assumptions(const ModelSpec& model, Interval domain);

/// If L eta = kappa * eta, lambda = eta and gamma = eta on the sampled domain,
/// returns kappa; otherwise std::nullopt.
std::optional<double> separable_kappa(const ModelSpec& model, Interval domain, int n_samples = 2001);

}  // namespace shjb
