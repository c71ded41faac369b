#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "shjb/error.hpp"
#include "shjb/odebench.hpp"
#include "shjb/rng.hpp"
#include "shjb/simulator.hpp"

using namespace shjb;

namespace {

// v = c * eta(y), constant in time
class ScaledEta final : public ValueField {
 public:
  ScaledEta(ModelSpec m, double c) : m_(std::move(m)), c_(c) {}
  double value(double, double y) const override { return c_ * m_.eta(y); }
  double last_time() const override { return m_.T - 1e-3; }

 private:
  ModelSpec m_;
  double c_;
};

const ModelSpec& ex1a() {
  static const ModelSpec m = build_model("ex1a");
  return m;
}
const OdeTable& ex1a_table() {
  static const OdeTable t = solve_a(2.0, 1.0, 1.0, 1e-3, 20000);
  return t;
}

}  // namespace

TEST_CASE("pure Brownian factor increments") {
  ModelSpec raw;
  raw.s0 = 2.0;
  raw.T = 100.0;
  const ModelSpec m = build_model(raw);
  const double dt = 1e-3;
  const std::vector<double> y = simulate_factor(m, 0.0, 0.3, dt, 99);
  REQUIRE(y.size() == 100001);
  CHECK(y.front() == 0.3);
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double d = y[i] - y[i - 1];
    s += d;
    s2 += d * d;
  }
  const double n = static_cast<double>(y.size() - 1);
  const double var = s2 / n - (s / n) * (s / n);
  CHECK(var == doctest::Approx(2.0 * dt).epsilon(0.05));
}

TEST_CASE("ex2 factor reverts to 5") {
  ModelOverrides o;
  o.T = 10.0;
  const ModelSpec m = build_model("ex2", o);
  const int n = 4000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double yT = simulate_factor(m, 0.0, 0.0, 1e-2, path_seeds(5, static_cast<std::uint64_t>(i)).brownian).back();
    s += yT;
    s2 += yT * yT;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 5.0) <= 3.0 * se);
}

TEST_CASE("factor paths are reproducible") {
  const ModelSpec m = build_model("ex2");
  CHECK(simulate_factor(m, 0.0, 3.0, 1e-3, 17) == simulate_factor(m, 0.0, 3.0, 1e-3, 17));
  CHECK(simulate_factor(m, 0.0, 3.0, 1e-3, 17) != simulate_factor(m, 0.0, 3.0, 1e-3, 18));
  CHECK_THROWS_AS(simulate_factor(m, 0.0, 3.0, 0.1, 17), Error);
}

TEST_CASE("Poisson fills") {
  CHECK(simulate_jumps(0.0, 0.0, 1.0, 1).empty());
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::vector<double> j = simulate_jumps(5.0, 0.0, 1.0, path_seeds(9, static_cast<std::uint64_t>(i)).poisson);
    CHECK(std::is_sorted(j.begin(), j.end()));
    if (!j.empty()) CHECK((j.front() > 0.0 && j.back() <= 1.0));
    s += static_cast<double>(j.size());
    s2 += static_cast<double>(j.size() * j.size());
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 5.0) <= 3.0 * se);
  CHECK(simulate_jumps(5.0, 0.0, 1.0, 4) == simulate_jumps(5.0, 0.0, 1.0, 4));
}

TEST_CASE("ex1a inventory does not depend on the factor") {
  const SeparableField field(ex1a_table(), ex1a());
  const SeedPair a{derive_seed(1, 0, Stream::Brownian), derive_seed(1, 0, Stream::Poisson)};
  const SeedPair b{derive_seed(2, 0, Stream::Brownian), a.poisson};
  const PathSample pa = simulate_policy(field, ex1a(), 0.0, 0.0, 1.0, 1e-3, a);
  const PathSample pb = simulate_policy(field, ex1a(), 0.0, 0.0, 1.0, 1e-3, b);
  REQUIRE(pa.y_path != pb.y_path);
  for (std::size_t i = 0; i < pa.x_path.size(); ++i) CHECK(std::abs(pa.x_path[i] - pb.x_path[i]) <= 1e-12);
}

TEST_CASE("a dark-pool fill at v = gamma halves the position") {
  // ex1a with v = eta: rate 1 and fill fraction 1/2
  const ScaledEta field(ex1a(), 1.0);
  bool seen = false;
  for (std::uint64_t i = 0; i < 20 && !seen; ++i) {
    const PathSample p = simulate_policy(field, ex1a(), 0.0, 0.5, 1.0, 1e-3, path_seeds(3, i));
    const double h = p.times[1] - p.times[0];
    for (std::size_t k = 1; k + 1 < p.times.size(); ++k) {
      if (!p.jump_flags[k]) continue;
      seen = true;
      CHECK(p.x_path[k] / p.x_path[k - 1] == doctest::Approx(0.5 * std::exp(-h)).epsilon(1e-9));
      CHECK(p.mu_applied[k] == doctest::Approx(0.5 * p.x_path[k - 1] * std::exp(-h)).epsilon(1e-9));
    }
  }
  CHECK(seen);
}

TEST_CASE("lit-only liquidation") {
  ModelOverrides o;
  o.theta = 0.0;
  const ModelSpec m0 = build_model("ex1a", o);
  const OdeTable t0 = solve_a(0.0, 1.0, 1.0, 1e-3, 20000);
  const SeparableField f0(t0, m0);
  const PathSample p = simulate_policy(f0, m0, 0.0, 1.0, 1.0, 1e-3, path_seeds(1, 0));
  for (std::size_t i = 1; i < p.x_path.size(); ++i) CHECK(p.x_path[i] < p.x_path[i - 1]);
  CHECK(p.x_path[p.x_path.size() - 2] <= 0.05);
  CHECK(p.x_path.back() == 0.0);
  for (std::size_t i = 1; i < p.cost_cum.size(); ++i) CHECK(p.cost_cum[i] >= p.cost_cum[i - 1]);
}

TEST_CASE("perturbations") {
  const SeparableField field(ex1a_table(), ex1a());
  CHECK_THROWS_AS(simulate_policy(field, ex1a(), 0.0, 0.0, 1.0, 1e-3, path_seeds(1, 0), Perturbation::scale_xi(0.4)),
                  Error);
  const PathSample frozen =
      simulate_policy(field, ex1a(), 0.0, 0.0, 1.0, 1e-3, path_seeds(1, 0), Perturbation::freeze_after(0.5));
  const std::size_t half = 500;
  for (std::size_t i = half + 1; i < frozen.x_path.size(); ++i) CHECK(frozen.x_path[i] == frozen.x_path[half + 1]);
  CHECK(frozen.x_path.back() > 0.0);

  const PathSample lit =
      simulate_policy(field, ex1a(), 0.0, 0.0, 1.0, 1e-3, path_seeds(1, 0), Perturbation::no_darkpool());
  for (double mu : lit.mu_applied) CHECK(mu == 0.0);
  CHECK(Perturbation::scale_xi(1.5).label() == "scale_xi(1.5)");
  CHECK(Perturbation::no_darkpool().label() == "no_darkpool");
}

TEST_CASE("Monte Carlo estimates") {
  const SeparableField field(ex1a_table(), ex1a());
  McSetup s;
  s.n_paths = 1000;
  s.base_seed = 11;
  s.threads = 1;
  const CostEstimate one = monte_carlo(field, ex1a(), s);
  s.threads = 4;
  const CostEstimate four = monte_carlo(field, ex1a(), s);
  CHECK(one.mean == four.mean);
  CHECK(one.std_error == four.std_error);
  CHECK(one.n_paths == 1000);

  s.n_paths = 4000;
  const CostEstimate big = monte_carlo(field, ex1a(), s);
  CHECK(one.std_error / big.std_error == doctest::Approx(2.0).epsilon(0.2));

  s.n_paths = 10;
  CHECK_THROWS_AS(monte_carlo(field, ex1a(), s), Error);

  s.n_paths = 200;
  s.x0 = 0.0;
  CHECK(monte_carlo(field, ex1a(), s).mean == 0.0);
}

TEST_CASE("leaving the surface is reported") {
  const ModelSpec m = build_model("ex2");
  const SupNorms n = estimate_sup_norms(m, {-10.0, 10.0});
  const ValueSurface small = solve(m, n, build_grid(-1.0, 1.0, 41, 1.0, 1e-3, 200));
  const SurfaceField field(small);
  try {
    simulate_policy(field, m, 0.0, 0.0, 1.0, 1e-3, path_seeds(1, 0));
    FAIL("expected SurfaceGapError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SurfaceGapError);
  }
}

TEST_CASE("summaries") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const CostEstimate e = summarize(x, 5);
  CHECK(e.mean == 2.5);
  CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(e.base_seed == 5);
  const TimeMesh mesh = make_mesh(0.0, 1.0, 1e-3);
  CHECK(mesh.steps == 1000);
  CHECK(mesh.at(mesh.steps) == 1.0);
}
