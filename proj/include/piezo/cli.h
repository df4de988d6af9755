#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "piezo/io.h"

namespace piezo {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CommandResult {
  std::vector<CheckResult> checks;
  std::vector<std::string> outputs;  // paths relative to the output directory

  bool AllPass() const;
};

/// Each command writes into cfg.out, echoes the resolved config and a
/// summary.json, and reports its checks. `log` receives human-readable lines.
CommandResult cmd_assemble(const RunConfig& cfg, std::ostream& log);
CommandResult cmd_spectrum(const RunConfig& cfg, std::ostream& log);
CommandResult cmd_sweep(const RunConfig& cfg, std::ostream& log);
CommandResult cmd_control(const RunConfig& cfg, std::ostream& log);
CommandResult cmd_simulate(const RunConfig& cfg, std::ostream& log);
CommandResult cmd_closedloop(const RunConfig& cfg, std::ostream& log);
/// Regenerates every plot in cfg.out from the CSV files found there.
CommandResult cmd_report(const RunConfig& cfg, std::ostream& log);

/// Exit codes: 0 all checks pass, 1 a check or computation failed,
/// 2 invalid configuration or arguments.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace piezo
