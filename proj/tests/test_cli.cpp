#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shjb/cli.hpp"
#include "shjb/csv.hpp"

using namespace shjb;
namespace fs = std::filesystem;

namespace {

ErrorCode parse_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a config error");
  return ErrorCode::Io;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("shjb_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SHJB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string first_line(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  return line;
}

}  // namespace

TEST_CASE("minimal ex2 config") {
  const RunConfig c = parse_config_text("# Figure 2\nmodel = ex2\ntheta = 5   # dark pool on\n\nT = 1\n");
  CHECK(c.model == "ex2");
  const ModelSpec m = c.model_spec();
  CHECK(m.theta == 5.0);
  CHECK(m.T == 1.0);
  CHECK(c.n_y == 401);
  CHECK(c.n_t == 2000);
  CHECK(c.resolved_eps() == doctest::Approx(1e-3));
  CHECK(c.resolved_y0() == std::vector<double>{1.0, 3.0, 5.0});
  CHECK(c.grid().n_t() == 2001);
}

TEST_CASE("config errors") {
  CHECK(parse_error("model = ex2\ntheta = 5\ntheta = 0\n") == ErrorCode::DuplicateKey);
  CHECK(parse_error("model = ex2\nthetta = 5\n") == ErrorCode::UnknownKey);
  CHECK(parse_error("model = ex2\nn_y = many\n") == ErrorCode::TypeMismatch);
  CHECK(parse_error("model = ex2\ndt = 1e-3x\n") == ErrorCode::TypeMismatch);
  CHECK(parse_error("model = ex2\nlayer = fancy\n") == ErrorCode::TypeMismatch);
  CHECK(parse_error("model = ex2\njust text\n") == ErrorCode::TypeMismatch);
  CHECK(parse_error("theta = 5\n") == ErrorCode::MissingRequired);
  CHECK(parse_error("model = custom\nb0 = 1\n") == ErrorCode::MissingRequired);
  CHECK(parse_error("model = ex99\n") == ErrorCode::UnknownModel);
  CHECK(parse_error("model = ex2\ntheta = -1\n") == ErrorCode::NegativeIntensity);
  try {
    parse_config("/nonexistent/shjb.conf");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("full config") {
  const RunConfig c = parse_config_text(
      "model = custom\nb0 = 0\nb1 = -1\ns0 = 1\ns1 = 0\neta_c = 1\neta_p = 0\nlambda_c = 1\nlambda_p = 0\n"
      "gamma_c = 1\ngamma_p = 0\ntheta = 1\nT = 2\ny_min = -4\ny_max = 4\nn_y = 81\nn_t = 300\neps = 0.01\n"
      "grading = 1.01\nlayer = envelope-geomean\nslack = 0.02\node_steps = 5000\ndt = 0.002\nn_paths = 500\n"
      "base_seed = 18446744073709551615\nt0 = 0.5\ny0 = 0, 1.5\nx0 = 2\nrel_tol = 0.03\nthreads = 2\n"
      "out_dir = /tmp/x\nsurface = s.csv\n");
  CHECK(c.model_spec().b1 == -1.0);
  CHECK(c.model_spec().T == 2.0);
  CHECK(c.layer == LayerMode::EnvelopeGeomean);
  CHECK(c.base_seed == 18446744073709551615ull);
  CHECK(c.y0 == std::vector<double>{0.0, 1.5});
  CHECK(c.n_paths == 500);
  CHECK(c.threads == 2);
  CHECK(c.surface == "s.csv");
  CHECK(c.grid().grading_ratio == 1.01);
  CHECK(parse_config_text("model = ex1a\n").resolved_y0() == std::vector<double>{-1.0, 0.0, 1.0});
}

TEST_CASE("subcommands and exit codes") {
  CHECK(parse_subcommand("solve") == Subcommand::Solve);
  CHECK(parse_subcommand("verify") == Subcommand::Verify);
  CHECK_FALSE(parse_subcommand("plot").has_value());
  CHECK(exit_code_for(ErrorCode::DuplicateKey) == kExitConfig);
  CHECK(exit_code_for(ErrorCode::Io) == kExitIo);
  CHECK(exit_code_for(ErrorCode::SingularTridiagonal) == kExitNumerical);
}

TEST_CASE("surface CSV round trip") {
  const ModelSpec m = build_model("ex2");
  const SupNorms n = estimate_sup_norms(m, {-10.0, 10.0});
  const ValueSurface s = solve(m, n, build_grid(-10.0, 10.0, 101, 1.0, 1e-3, 300, 1.01));
  std::stringstream ss;
  write_surface_csv(ss, s);
  const ValueSurface back = read_surface_csv(ss, m);
  CHECK(back.grid().t_nodes == s.grid().t_nodes);
  CHECK(back.grid().y_nodes == s.grid().y_nodes);
  CHECK(std::equal(s.values().begin(), s.values().end(), back.values().begin(), back.values().end()));
  CHECK(back.grid().eps == doctest::Approx(1e-3).epsilon(1e-9));

  // verification from the file equals verification in memory
  McConfig mc;
  mc.n_paths = 300;
  const CheckResult a = verify_value(SurfaceField(s), m, 0.0, 3.0, 1.0, mc);
  const CheckResult b = verify_value(SurfaceField(back), m, 0.0, 3.0, 1.0, mc);
  CHECK(a.measured == b.measured);
  CHECK(a.threshold == b.threshold);

  std::stringstream bad("t,y,v\n1,2,3\n");
  CHECK_THROWS_AS(read_surface_csv(bad, m), Error);
  CHECK(format_g17(0.1) == "0.10000000000000001");
}

TEST_CASE("run: solve, envelopes and benchmark artifacts") {
  const fs::path out = scratch("solve");
  RunConfig c = parse_config_text("model = ex1a\nn_y = 201\nn_t = 1000\n");
  c.out_dir = out.string();
  std::ostringstream log;
  CHECK(run(Subcommand::Solve, c, log) == kExitPass);
  CHECK(first_line(out / "surface.csv") == "t,y,v,w");
  CHECK(first_line(out / "envelopes.csv") == "t,y,v,check_v,hat_v,in_sandwich");
  CHECK(first_line(out / "report.csv") == "check,measured,threshold,pass,seed,runtime_ms");
  CHECK(slurp(out / "surface.csv").find('\r') == std::string::npos);

  CHECK(run(Subcommand::Benchmark, c, log) == kExitPass);
  CHECK(first_line(out / "ode.csv") == "t,a");

  // solve -> file -> envelopes from the file
  const fs::path out2 = scratch("envelopes");
  RunConfig from_file = c;
  from_file.surface = (out / "surface.csv").string();
  from_file.out_dir = out2.string();
  CHECK(run(Subcommand::Envelopes, from_file, log) == kExitPass);
  CHECK(slurp(out2 / "envelopes.csv") == slurp(out / "envelopes.csv"));

  RunConfig ex2 = parse_config_text("model = ex2\nn_y = 101\nn_t = 300\n");
  ex2.out_dir = out.string();
  try {
    run(Subcommand::Benchmark, ex2, log);
    FAIL("expected NotSeparable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSeparable);
  }
}

TEST_CASE("run: figure reproduction") {
  const fs::path lit = scratch("fig1");
  RunConfig c = parse_config_text("model = ex2\ntheta = 0\nn_paths = 200\n");
  c.out_dir = lit.string();
  std::ostringstream log;
  CHECK(run(Subcommand::Simulate, c, log) == kExitPass);
  CHECK(log.str().find("PASS initial_rate_increasing") != std::string::npos);
  CHECK(first_line(lit / "paths.csv") == "path_id,s,y,x,xi,mu,jump,cost_cum");
  CHECK(first_line(lit / "estimates.csv") == "label,mean,stderr,n_paths,seed");

  const fs::path dark = scratch("fig3");
  RunConfig d = parse_config_text("model = ex2\ntheta = 5\ny0 = 3\nn_paths = 200\nthreads = 1\n");
  d.out_dir = dark.string();
  std::ostringstream log2;
  CHECK(run(Subcommand::Simulate, d, log2) == kExitPass);
  CHECK(log2.str().find("PASS darkpool_lowers_initial_rate") != std::string::npos);
  CHECK(fs::exists(dark / "paths_theta0.csv"));

  // byte-identical across reruns and thread counts
  const fs::path again = scratch("fig3b");
  d.out_dir = again.string();
  d.threads = 3;
  CHECK(run(Subcommand::Simulate, d, log2) == kExitPass);
  for (const char* f : {"paths.csv", "paths_theta0.csv", "estimates.csv"}) {
    CHECK(slurp(dark / f) == slurp(again / f));
  }
}

TEST_CASE("executable exit codes") {
  const fs::path dir = scratch("exe");
  std::ofstream(dir / "dup.conf") << "model = ex2\ntheta = 5\ntheta = 0\n";
  std::ofstream(dir / "ex1a.conf") << "model = ex1a\n";
  CHECK(run_cli("verify --config " + (dir / "dup.conf").string()) == kExitConfig);
  CHECK(run_cli("verify --config " + (dir / "missing.conf").string()) == kExitIo);
  CHECK(run_cli("frobnicate --config " + (dir / "ex1a.conf").string()) == kExitConfig);
  CHECK(run_cli("verify --config " + (dir / "ex1a.conf").string() + " --out " + (dir / "out").string()) ==
        kExitPass);
  CHECK(first_line(dir / "out" / "report.csv") == "check,measured,threshold,pass,seed,runtime_ms");
  CHECK(run_cli("simulate --config " + (dir / "ex1a.conf").string() + " --out " + (dir / "sim").string() +
                " --seed 7 --paths 150") == kExitPass);
  CHECK(slurp(dir / "sim" / "estimates.csv").find(",150,7\n") != std::string::npos);
}
