#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shjb/model.hpp"
#include "shjb/simulator.hpp"

namespace shjb {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  double runtime_ms = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, CostEstimate>> estimates;

  bool all_pass() const;
};

struct McConfig {
  double dt = 1e-3;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// |MC mean - v(t0,y0) x0^2| <= max(3 stderr, rel_tol v x0^2).
CheckResult verify_value(const ValueField& value, const ModelSpec& model, double t0, double y0, double x0,
                         const McConfig& mc, double rel_tol = 2e-2, CostEstimate* estimate = nullptr);

/// Every perturbed policy costs more than the feedback policy by > 3 combined stderr.
/// measured = smallest z-score (difference / combined stderr), threshold = 3.
CheckResult verify_suboptimality(const ValueField& value, const ModelSpec& model, double t0, double y0, double x0,
                                 const std::vector<Perturbation>& perturbations, const McConfig& mc,
                                 std::vector<std::pair<std::string, CostEstimate>>* estimates = nullptr);

/// Decay bound |X(s)| <= C x0 (T-s)/delta on [T-delta, T-dt]; measured is
/// max over paths and s of |X(s)| delta / (x0 (T-s)), threshold C.
CheckResult verify_liquidation(const std::vector<PathSample>& paths, const ModelSpec& model, const SupNorms& norms);

/// Feynman-Kac consistency |E[v(s,Y_s) + int_t^s F(Y, v) dr] - v(t,y)|.
CheckResult verify_fbsde(const ValueField& value, const ModelSpec& model, double t, double s, double y,
                         const McConfig& mc, double rel_tol = 2e-2);

/// E[v(s,Y_s) X_s^2] at increasing checkpoints: nonincreasing and the last value
/// at most 5% of v(t0,y0) x0^2.
CheckResult verify_residual_cost(const ValueField& value, const ModelSpec& model, double t0, double y0, double x0,
                                 const std::vector<double>& checkpoints, const McConfig& mc,
                                 Perturbation perturbation = {}, std::vector<double>* values = nullptr);

/// Simulates n_paths optimal-policy paths (seeds derived from mc.seed).
std::vector<PathSample> simulate_batch(const ValueField& value, const ModelSpec& model, double t0, double y0,
                                       double x0, const McConfig& mc, Perturbation perturbation = {});

}  // namespace shjb
