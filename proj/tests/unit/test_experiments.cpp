#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <set>

#include "gglab/error.hpp"
#include "gglab/experiments.hpp"

using namespace gglab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gglab-exp-" + name);
  fs::remove_all(p);
  return p;
}

// cheap variant of the occupation-time experiment
ExperimentConfig small_hs() {
  ExperimentConfig c = find_experiment("hs-identity")->defaults();
  c.n = 3;
  c.params["walkers"] = "2000";
  return c;
}

}  // namespace

TEST(Experiments, RegistryIsComplete) {
  const std::vector<std::string> want = {"green-asymptotics", "delocalize-2d", "pinning",          "tilt",
                                         "brascamp-lieb",     "coupling-contraction", "hs-identity", "cov-decay-A",
                                         "cov-decay-B",       "nonexist-2d",   "convolution-appendix"};
  std::set<std::string> got;
  for (const auto& e : experiment_registry()) {
    got.insert(e.name);
    ExperimentConfig c = e.defaults();
    EXPECT_EQ(c.experiment, e.name);
    EXPECT_NO_THROW(validate_config(c)) << e.name;
    EXPECT_EQ(parse_config(serialize_config(c)), c) << e.name;
    EXPECT_GT(e.budget_seconds, 0.0);
    EXPECT_FALSE(e.description.empty());
  }
  EXPECT_EQ(experiment_registry().size(), 11u);
  EXPECT_EQ(got, std::set<std::string>(want.begin(), want.end()));
}

TEST(Experiments, UnknownNameIsUsageError) {
  const auto r = run_experiment("no-such-thing", RunOptions{});
  EXPECT_EQ(r.exit_code, kExitUsage);
  EXPECT_NE(r.error.find("no-such-thing"), std::string::npos);
}

TEST(Experiments, BadConfigIsUsageError) {
  ExperimentConfig c = small_hs();
  c.n = 0;
  EXPECT_EQ(run_experiment(c, scratch("bad"), 1).exit_code, kExitUsage);
  const fs::path dir = scratch("badfile");
  fs::create_directories(dir);
  write_file(dir / "c.ini", "[experiment]\nname = hs-identity\n[lattice]\nwhat = 3\n");
  RunOptions o;
  o.config = dir / "c.ini";
  EXPECT_EQ(run_experiment("hs-identity", o).exit_code, kExitUsage);
  o.config = dir / "missing.ini";
  EXPECT_NE(run_experiment("hs-identity", o).exit_code, kExitPass);
  fs::remove_all(dir);
}

TEST(Experiments, ArtifactsAndReplay) {
  const fs::path out = scratch("replay");
  const auto r = run_experiment(small_hs(), out, 2);
  ASSERT_TRUE(r.exit_code == kExitPass || r.exit_code == kExitCheckFail) << r.error;
  const fs::path dir = out / "hs-identity";
  for (const char* f : {"manifest.json", "config.ini", "summary.txt", "failures.json"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  bool csv = false;
  for (const auto& e : fs::directory_iterator(dir)) csv |= e.path().extension() == ".csv";
  EXPECT_TRUE(csv);

  // a different thread count must reproduce the deterministic outputs
  const auto same = replay(dir / "manifest.json", 1);
  EXPECT_TRUE(same.identical) << (same.drift.empty() ? same.error : same.drift.front());
  EXPECT_EQ(same.exit_code, kExitPass);

  // an edited seed is detected
  std::string ini = read_file(dir / "config.ini");
  const auto at = ini.find("seed = ");
  ASSERT_NE(at, std::string::npos);
  ini.replace(at, ini.find('\n', at) - at, "seed = 999");
  write_file(dir / "config.ini", ini);
  const auto edited = replay(dir / "manifest.json");
  EXPECT_FALSE(edited.identical);
  EXPECT_EQ(edited.exit_code, kExitCheckFail);
  fs::remove_all(out);
}

TEST(Experiments, SeedChangesOutputs) {
  const fs::path a = scratch("seed-a"), b = scratch("seed-b");
  ExperimentConfig c = small_hs();
  run_experiment(c, a, 1);
  c.seed = 2;
  run_experiment(c, b, 1);
  std::string fa, fb;
  for (const auto& e : fs::directory_iterator(a / "hs-identity"))
    if (e.path().extension() == ".csv") {
      fa = read_file(e.path());
      fb = read_file(b / "hs-identity" / e.path().filename());
    }
  EXPECT_FALSE(fa.empty());
  EXPECT_NE(fa, fb);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Experiments, EnvironmentOverrides) {
  const fs::path out = scratch("env");
  const fs::path dir = scratch("env-cfg");
  fs::create_directories(dir);
  write_file(dir / "c.ini", serialize_config(small_hs()));
  ::setenv("GGLAB_OUT", out.c_str(), 1);
  ::setenv("GGLAB_THREADS", "2", 1);
  RunOptions o;
  o.config = dir / "c.ini";
  const auto r = run_experiment("hs-identity", o);
  ::unsetenv("GGLAB_OUT");
  ::unsetenv("GGLAB_THREADS");
  EXPECT_EQ(r.out_dir, out / "hs-identity");
  EXPECT_TRUE(fs::exists(out / "hs-identity" / "manifest.json"));
  EXPECT_NE(read_file(out / "hs-identity" / "manifest.json").find("\"threads\": 2"), std::string::npos);
  fs::remove_all(out);
  fs::remove_all(dir);
}
