#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "manifest.hpp"
#include "run_config.hpp"

namespace pdirac::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitSchema = 2,
  kExitNumerical = 3,  // numerical failure or a failed invariant check
  kExitInadmissible = 4,
};

const std::vector<std::string>& subcommands();

/// Every tolerance and default threshold a run can touch, as recorded in the manifest.
json tolerances_json();

/// Runs one subcommand and writes its artifacts to cfg.out_dir. Module
/// exceptions are mapped to exit codes; the manifest is written in all cases
/// once the output directory exists.
int run(const RunConfig& cfg, const std::string& subcommand, std::ostream& log);

/// validate: prints diagnostics, writes diagnostics.json; exit 0 when clean,
/// 4 when a diagnostic is reported.
int run_validate(const RunConfig& cfg, std::ostream& log);

}  // namespace pdirac::cli
