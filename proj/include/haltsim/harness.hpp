#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "haltsim/error.hpp"

namespace haltsim::harness {

/// Flat key/value experiment description.
struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> params;
  std::uint64_t seed = 1;
  std::string output;  // CSV path; empty picks <output dir>/<experiment>.csv
};

/// Output directory override.
inline constexpr const char* kOutputDirEnv = "HALTSIM_OUTPUT_DIR";

const std::vector<std::string>& experiments();

/// Parses "key = value" lines; '#' starts a comment.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Applies one "key=value" override.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

/// Column names of an experiment's CSV.
const std::vector<std::string>& schema(const std::string& experiment);

/// Throws input errors naming the offending key.
void validate_config(const ExperimentConfig& cfg);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

std::string format_double(double x);

struct RunOutput {
  CsvTable table;
  std::string summary;
  std::string path;
};

/// Runs the experiment and returns the table without writing it.
RunOutput run_experiment_table(const ExperimentConfig& cfg);

/// Runs and writes the CSV.
RunOutput run_experiment(const ExperimentConfig& cfg);

std::string resolve_output_path(const ExperimentConfig& cfg);

enum class Level { fast, full };

struct CheckResult {
  std::string module;
  std::string invariant;
  std::string observed;
  bool passed = false;
  double seconds = 0;
};

struct SuiteReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  std::string to_string() const;
};

struct SuiteOptions {
  Level level = Level::fast;
  bool inject_fault = false;  // adds a deliberately non-unitary gate to the unitarity check
  std::function<void(const CheckResult&)> on_check;
};

SuiteReport validate_suite(const SuiteOptions& opt);

}  // namespace haltsim::harness
