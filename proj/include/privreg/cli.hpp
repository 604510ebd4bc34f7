// Experiment driver behind the privreg_cli binary: config loading,
// per-command dispatch and JSON run reports.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "privreg/io.hpp"

namespace privreg {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,         // bad flags, unknown or ill-typed config keys
  kExitSchema = 2,        // malformed class, dataset or JSON file
  kExitPrecondition = 3,  // precondition, domain or oracle-cap refusal
  kExitTreeError = 4,     // ReduceTreeReg halted with ERROR
  kExitBottom = 5,        // sparse selection returned BOTTOM
  kExitTheoretical = 6,   // parameter formula beyond desk scale
  kExitCheckFailed = 7,   // oracle disagreement or audit violation
};

extern const char* const kVersion;
extern const std::vector<std::string> kCommands;

struct ExperimentOptions {
  std::string command;
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  std::vector<std::string> overrides;  // KEY=VAL with dotted keys
};

struct RunResult {
  int exit_code = kExitOk;
  // {"body": deterministic part, "meta": wall time and version}.
  Json report;
};

// Never throws for typed failures; they become exit codes and an "error"
// entry in the report body.
RunResult run_experiment(const ExperimentOptions& opts);

// Applies one KEY=VAL override; VAL is parsed as JSON, else taken as a string.
void apply_override(Json& config, const std::string& assignment);

int cli_main(int argc, char** argv);

}  // namespace privreg
