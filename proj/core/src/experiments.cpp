#include "gglab/experiments.hpp"

#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "gglab/error.hpp"
#include "gglab/parallel.hpp"

#ifndef GGLAB_VERSION
#define GGLAB_VERSION "0.0.0"
#endif

namespace gglab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kManifest = "manifest.json";

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

// hash of the config with the run-location fields blanked, so moving the
// output or changing the thread count does not change the CSV preamble
std::string canonical_text(const ExperimentConfig& c) {
  ExperimentConfig k = c;
  k.output_dir = "-";
  k.threads = 0;
  return serialize_config(k);
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream o;
  o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return o.str();
}

std::string fmt_check(const Check& c) {
  std::ostringstream o;
  o << (c.passed ? "[PASS] " : "[FAIL] ") << c.id << ": " << c.description << " (measured " << format_number(c.measured)
    << ", target " << format_number(c.target) << ", tolerance " << format_number(c.tolerance) << ")";
  return o.str();
}

json check_json(const Check& c) {
  return {{"id", c.id},         {"description", c.description}, {"measured", c.measured},
          {"target", c.target}, {"tolerance", c.tolerance},     {"passed", c.passed}};
}

}  // namespace

bool ExperimentOutput::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

void ExperimentOutput::check(std::string id, std::string description, double measured, double target, double tolerance,
                             bool ok) {
  checks.push_back({std::move(id), std::move(description), measured, target, tolerance, ok});
}

void StageTimer::start(std::string name) {
  if (!current_.empty()) stop();
  current_ = std::move(name);
  t0_ = std::chrono::steady_clock::now();
}

void StageTimer::stop() {
  if (current_.empty()) return;
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0_;
  stages_.emplace_back(current_, dt.count());
  current_.clear();
}

const ExperimentInfo* find_experiment(const std::string& name) {
  for (const auto& e : experiment_registry())
    if (e.name == name) return &e;
  return nullptr;
}

std::string code_version() { return GGLAB_VERSION; }

RunResult run_experiment(const std::string& name, const RunOptions& opts) {
  RunResult res;
  const ExperimentInfo* info = find_experiment(name);
  if (!info) {
    res.exit_code = kExitUsage;
    res.error = "unknown experiment '" + name + "' (see `gglab list`)";
    return res;
  }
  ExperimentConfig cfg;
  try {
    cfg = opts.config ? load_config(*opts.config) : info->defaults();
  } catch (const Error& e) {
    res.exit_code = kExitUsage;
    res.error = e.what();
    return res;
  }
  if (cfg.experiment.empty()) cfg.experiment = name;
  if (cfg.experiment != name) {
    res.exit_code = kExitUsage;
    res.error = "config is for experiment '" + cfg.experiment + "', not '" + name + "'";
    return res;
  }
  if (opts.seed) cfg.seed = *opts.seed;

  fs::path out = cfg.output_dir;
  if (opts.out)
    out = *opts.out;
  else if (auto e = env("GGLAB_OUT"))
    out = *e;
  int threads = cfg.threads;
  if (opts.threads) {
    threads = *opts.threads;
  } else if (auto e = env("GGLAB_THREADS")) {
    try {
      threads = std::stoi(*e);
    } catch (const std::exception&) {
      res.exit_code = kExitUsage;
      res.error = "GGLAB_THREADS is not an integer";
      return res;
    }
  }
  return run_experiment(cfg, out, threads);
}

RunResult run_experiment(const ExperimentConfig& cfg_in, const fs::path& out_root, int threads) {
  RunResult res;
  ExperimentConfig cfg = cfg_in;
  cfg.output_dir = out_root.string();
  cfg.threads = threads;
  const ExperimentInfo* info = find_experiment(cfg.experiment);
  if (!info) {
    res.exit_code = kExitUsage;
    res.error = "unknown experiment '" + cfg.experiment + "'";
    return res;
  }
  try {
    validate_config(cfg);
    if (threads < 0) throw ConfigError("thread count must be >= 0");
  } catch (const Error& e) {
    res.exit_code = kExitUsage;
    res.error = e.what();
    return res;
  }

  const fs::path dir = out_root / cfg.experiment;
  res.out_dir = dir;
  RunContext ctx;
  ctx.threads = resolve_threads(threads);
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fs::create_directories(dir);
    res.output = info->run(cfg, ctx);
  } catch (const std::exception& e) {
    res.exit_code = kExitRuntime;
    res.error = e.what();
  }
  ctx.timer.stop();
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json failures = json::array();
  json manifest;
  try {
    ExperimentOutput& o = res.output;
    const std::string hash = sha256_hex(canonical_text(cfg)).substr(0, 16);
    std::string input_bytes;
    for (const auto& [file, snap] : o.inputs) input_bytes += encode_snapshot(snap);
    const std::string address = git_blob_id(o.inputs.empty() ? canonical_text(cfg) : input_bytes);

    json inventory = json::array();
    auto emit = [&](const std::string& file, const std::string& bytes, bool deterministic) {
      write_file(dir / file, bytes);
      inventory.push_back({{"file", file}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}, {"deterministic", deterministic}});
    };
    if (res.exit_code == kExitPass) {
      for (auto& [file, table] : o.tables) {
        std::vector<std::pair<std::string, std::string>> meta = {{"experiment", cfg.experiment},
                                                                 {"config_hash", hash},
                                                                 {"seed", std::to_string(cfg.seed)},
                                                                 {"inputs", address}};
        meta.insert(meta.end(), table.meta.begin(), table.meta.end());
        table.meta = std::move(meta);
        emit(file, table.render(), true);
      }
      for (const auto& [file, snap] : o.inputs) emit(file, encode_snapshot(snap), true);
      const bool within = res.seconds <= info->budget_seconds;
      o.check("budget", "wall clock within the declared budget (seconds)", res.seconds, info->budget_seconds, 0.0, within);
      res.exit_code = o.passed() ? kExitPass : kExitCheckFail;
    }
    emit("config.ini", serialize_config(cfg), true);

    for (const auto& c : o.checks)
      if (!c.passed) failures.push_back(check_json(c));
    if (!res.error.empty()) failures.push_back({{"id", "runtime"}, {"error", res.error}});
    emit("failures.json", failures.dump(2) + "\n", false);

    std::ostringstream sum;
    sum << "experiment: " << cfg.experiment << "\n" << info->description << "\n\n";
    for (const auto& c : o.checks) sum << fmt_check(c) << "\n";
    if (!res.error.empty()) sum << "[ERROR] " << res.error << "\n";
    for (const auto& n : o.notes) sum << "note: " << n << "\n";
    sum << "\nresult: " << (res.exit_code == kExitPass ? "PASS" : res.exit_code == kExitCheckFail ? "FAIL" : "ERROR") << "\n";
    sum << "wall clock: " << format_number(res.seconds) << " s (budget " << format_number(info->budget_seconds) << " s)\n";
    emit("summary.txt", sum.str(), false);

    json stages = json::array();
    for (const auto& [n, s] : ctx.timer.stages()) stages.push_back({{"stage", n}, {"seconds", s}});
    json checks = json::array();
    for (const auto& c : o.checks) checks.push_back(check_json(c));
    manifest = {{"experiment", cfg.experiment},
                {"version", code_version()},
                {"config", serialize_config(cfg)},
                {"config_hash", hash},
                {"seed", cfg.seed},
                {"threads", ctx.threads},
                {"inputs", address},
                {"started", started},
                {"wall_clock_seconds", res.seconds},
                {"budget_seconds", info->budget_seconds},
                {"stages", stages},
                {"checks", checks},
                {"exit_code", res.exit_code},
                {"outputs", inventory}};
    write_file(dir / kManifest, manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    res.exit_code = kExitRuntime;
    res.error = std::string("writing artifacts: ") + e.what();
  }
  return res;
}

ReplayResult replay(const fs::path& manifest_path, std::optional<int> threads) {
  ReplayResult rr;
  try {
    const json m = json::parse(read_file(manifest_path));
    const fs::path dir = manifest_path.parent_path();
    const ExperimentConfig cfg = load_config(dir / "config.ini");
    const int t = threads ? *threads : m.at("threads").get<int>();

    const fs::path scratch = fs::temp_directory_path() / ("gglab-replay-" + sha256_hex(fs::absolute(manifest_path).string() + utc_now()).substr(0, 12));
    fs::remove_all(scratch);
    const RunResult run = run_experiment(cfg, scratch, t);
    if (run.exit_code == kExitUsage || run.exit_code == kExitRuntime) {
      fs::remove_all(scratch);
      rr.exit_code = run.exit_code;
      rr.error = "replay run failed: " + run.error;
      return rr;
    }
    for (const auto& entry : m.at("outputs")) {
      if (!entry.at("deterministic").get<bool>()) continue;
      const std::string file = entry.at("file").get<std::string>();
      const fs::path orig = dir / file, again = run.out_dir / file;
      if (!fs::exists(orig)) {
        rr.drift.push_back(file + ": missing from the original output");
        continue;
      }
      if (file == "config.ini") {
        // the replay writes its own location; compare the original against the manifest only
        if (sha256_file(orig) != entry.at("sha256").get<std::string>()) rr.drift.push_back(file + ": edited since the run");
        continue;
      }
      if (!fs::exists(again)) {
        rr.drift.push_back(file + ": not produced by the replay");
        continue;
      }
      const std::string want = entry.at("sha256").get<std::string>();
      if (sha256_file(orig) != want) rr.drift.push_back(file + ": differs from the manifest checksum");
      if (sha256_file(again) != want) rr.drift.push_back(file + ": replay checksum differs");
    }
    fs::remove_all(scratch);
    rr.identical = rr.drift.empty();
    rr.exit_code = rr.identical ? kExitPass : kExitCheckFail;
  } catch (const json::exception& e) {
    rr.exit_code = kExitRuntime;
    rr.error = std::string("bad manifest: ") + e.what();
  } catch (const std::exception& e) {
    rr.exit_code = kExitRuntime;
    rr.error = e.what();
  }
  return rr;
}

}  // namespace gglab
