#pragma once

#include <iosfwd>
#include <string>

#include "config.hpp"

namespace vibronic::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kResource = 3,
  kUnstable = 4,
};

std::string usage();

/// Runs cfg.task, writing artifacts and run_manifest.json into cfg.out_dir.
/// Diagnostics go to `log`. Returns an ExitCode.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace vibronic::cli
