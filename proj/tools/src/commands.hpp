#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "experiment_config.hpp"

namespace rsopt::cli {

enum class Command { kSolveOne, kEsrSweep, kDof, kMSweep, kRegion, kSelftest };

Command parse_command(const std::string& name);
const char* to_string(Command c);

/// Exit statuses of the executable.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

/// Runs one experiment, writing CSVs and manifest.txt into `out_dir` and a
/// human-readable summary to `log`. Returns an exit status; exceptions are
/// mapped to statuses by the caller.
int run_command(Command cmd, const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                std::ostream& log);

/// Version string recorded in manifests.
const char* code_version();

}  // namespace rsopt::cli
