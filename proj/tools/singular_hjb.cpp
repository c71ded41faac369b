#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "shjb/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Singular-control HJB solver and verification battery"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  unsigned threads = 0;
  for (const char* name : {"solve", "benchmark", "simulate", "verify", "envelopes"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "config file (key = value)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "base seed");
    sub->add_option("--paths", paths, "Monte Carlo paths");
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : shjb::kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    shjb::RunConfig cfg = shjb::parse_config(config_path);
    if (sub->count("--out")) cfg.out_dir = out_dir;
    if (sub->count("--seed")) cfg.base_seed = seed;
    if (sub->count("--paths")) cfg.n_paths = paths;
    if (sub->count("--threads")) cfg.threads = threads;
    return shjb::run(*shjb::parse_subcommand(sub->get_name()), cfg, std::cout);
  } catch (const shjb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return shjb::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return shjb::kExitNumerical;
  }
}
