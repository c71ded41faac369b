#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>

#include "shjb/config.hpp"
#include "shjb/error.hpp"

namespace shjb {

enum class Subcommand { Solve, Benchmark, Simulate, Verify, Envelopes };

std::optional<Subcommand> parse_subcommand(std::string_view name);

/// Process exit codes.
enum ExitCode : int {
  kExitPass = 0,
  kExitCheckFailed = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

int exit_code_for(ErrorCode code);

/// Runs one subcommand, writing CSV artifacts into cfg.out_dir and a short
/// human-readable log. Returns kExitPass iff every invoked check passed.
/// Throws shjb::Error on failure; callers map it with exit_code_for.
int run(Subcommand cmd, const RunConfig& cfg, std::ostream& log);

}  // namespace shjb
