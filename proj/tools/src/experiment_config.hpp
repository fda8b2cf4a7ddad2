#pragma once

#include <map>
#include <string>
#include <vector>

#include "rsopt/eval_harness.hpp"

namespace rsopt::cli {

/// Fully resolved experiment settings. Every field maps to one
/// "section.key" entry of the flat config format.
struct ExperimentConfig {
  SystemConfig system;
  double snr_db = 30.0;  // single-point commands

  HarnessConfig harness;
  std::vector<double> snr_list{20, 25, 30, 35, 40};
  std::vector<Scheme> schemes{Scheme::kRsOpt, Scheme::kNoRsOpt, Scheme::kNoRsZf,
                              Scheme::kRsZfSvd};
  double slope_window_db = 15.0;
  std::vector<int> m_list{1, 10, 100, 1000};
  double m_sweep_snr_db = 35.0;
  double region_snr_db = 30.0;
  bool traces = false;

  /// Canonical text form; parse_config(to_text()) reproduces the config.
  std::string to_text() const;
};

/// Applies one "section.key = value" assignment. Throws ConfigError naming
/// the key on unknown keys or malformed values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Parses the flat format: "[section]" headers, "key = value" lines, '#'
/// comments. Keys outside a section must be written as "section.key".
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path);

/// Applies a "--set" override of the form "section.key=value".
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

/// Checks cross-field constraints; throws ConfigError.
void validate(const ExperimentConfig& cfg);

}  // namespace rsopt::cli
