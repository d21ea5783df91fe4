#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gglab/config.hpp"
#include "gglab/io.hpp"

namespace gglab {

enum ExitCode : int { kExitPass = 0, kExitCheckFail = 1, kExitUsage = 2, kExitRuntime = 3 };

struct Check {
  std::string id;
  std::string description;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct ExperimentOutput {
  std::vector<Check> checks;
  std::vector<std::pair<std::string, CsvTable>> tables;  // file name, table
  std::vector<std::pair<std::string, Snapshot>> inputs;  // disorder snapshots feeding the run
  std::vector<std::string> notes;

  bool passed() const;
  void check(std::string id, std::string description, double measured, double target, double tolerance, bool passed);
};

class StageTimer {
 public:
  void start(std::string name);
  void stop();
  const std::vector<std::pair<std::string, double>>& stages() const { return stages_; }

 private:
  std::vector<std::pair<std::string, double>> stages_;
  std::string current_;
  std::chrono::steady_clock::time_point t0_;
};

struct RunContext {
  int threads = 1;
  StageTimer timer;
};

using ExperimentFn = std::function<ExperimentOutput(const ExperimentConfig&, RunContext&)>;

struct ExperimentInfo {
  std::string name;
  std::string description;
  double budget_seconds = 0.0;  // declared for an 8-core reference machine
  std::function<ExperimentConfig()> defaults;
  ExperimentFn run;
};

// stable order
const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo* find_experiment(const std::string& name);

struct RunOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<int> threads;
};

struct RunResult {
  int exit_code = kExitPass;
  std::filesystem::path out_dir;
  ExperimentOutput output;
  double seconds = 0.0;
  std::string error;
};

// Resolves the config (file, then --seed/--out/--threads, then GGLAB_OUT and
// GGLAB_THREADS when the flags are absent), runs, and writes into
// <out>/<name>/: CSV tables, snapshots, config.ini, manifest.json,
// summary.txt, failures.json.
RunResult run_experiment(const std::string& name, const RunOptions& opts);
// same with an in-memory config
RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, int threads);

struct ReplayResult {
  int exit_code = kExitPass;
  bool identical = false;
  std::vector<std::string> drift;
  std::string error;
};

// Re-runs the manifest's experiment from the config.ini beside it in a
// scratch directory and compares checksums of the deterministic outputs.
ReplayResult replay(const std::filesystem::path& manifest, std::optional<int> threads = std::nullopt);

std::string code_version();

}  // namespace gglab
