#include <CLI11.hpp>

#include <iostream>

#include "gglab/experiments.hpp"

using namespace gglab;

int main(int argc, char** argv) {
  CLI::App app{"gradient Gibbs measure lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", code_version());

  auto* run = app.add_subcommand("run", "run a named experiment");
  std::string name;
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 0;
  run->add_option("name", name, "experiment name (see `gglab list`)")->required();
  auto* o_cfg = run->add_option("--config", config, "INI config; the built-in defaults when omitted");
  auto* o_seed = run->add_option("--seed", seed, "master seed");
  auto* o_out = run->add_option("--out", out, "output root (env GGLAB_OUT)");
  auto* o_thr = run->add_option("--threads", threads, "worker threads, 0 = all cores (env GGLAB_THREADS)")->check(CLI::NonNegativeNumber);

  auto* list = app.add_subcommand("list", "list experiments with descriptions");
  bool show_defaults = false;
  list->add_flag("--defaults", show_defaults, "print each default config");

  auto* rep = app.add_subcommand("replay", "re-run from a manifest and compare checksums");
  std::string manifest;
  int rthreads = 0;
  rep->add_option("manifest", manifest, "path to manifest.json")->required()->check(CLI::ExistingFile);
  auto* o_rthr = rep->add_option("--threads", rthreads, "worker threads for the replay")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  if (*list) {
    for (const auto& e : experiment_registry()) {
      std::cout << e.name << "\t" << e.description << "\n";
      if (show_defaults) std::cout << serialize_config(e.defaults()) << "\n";
    }
    return kExitPass;
  }

  if (*run) {
    RunOptions opts;
    if (*o_cfg) opts.config = config;
    if (*o_seed) opts.seed = seed;
    if (*o_out) opts.out = out;
    if (*o_thr) opts.threads = threads;
    const RunResult r = run_experiment(name, opts);
    if (r.exit_code == kExitUsage) {
      std::cerr << "gglab: " << r.error << "\n";
      return r.exit_code;
    }
    for (const auto& c : r.output.checks)
      std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.id << "  measured=" << format_number(c.measured)
                << " target=" << format_number(c.target) << " tol=" << format_number(c.tolerance) << "\n";
    if (!r.error.empty()) std::cerr << "gglab: " << r.error << "\n";
    std::cout << "artifacts: " << r.out_dir.string() << "\n";
    return r.exit_code;
  }

  std::optional<int> t;
  if (*o_rthr) t = rthreads;
  const ReplayResult r = replay(manifest, t);
  if (!r.error.empty()) {
    std::cerr << "gglab: " << r.error << "\n";
    return r.exit_code;
  }
  for (const auto& d : r.drift) std::cout << "drift: " << d << "\n";
  std::cout << (r.identical ? "replay identical" : "replay differs") << "\n";
  return r.exit_code;
}
