#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gglab/disorder.hpp"
#include "gglab/lattice.hpp"
#include "gglab/potential.hpp"

namespace gglab {

struct DynamicsConfig {
  double h = 0.0;          // 0: default step
  double burn_in = -1.0;   // < 0: default burn-in
  std::size_t thinning = 0;
  std::size_t samples = 200;

  friend bool operator==(const DynamicsConfig&, const DynamicsConfig&) = default;
};

// INI sections: [experiment] [lattice] [model] [disorder] [boundary]
// [dynamics] [ensemble] [output] [params]. [params] holds experiment-specific
// knobs as strings (lists are comma separated).
struct ExperimentConfig {
  std::string experiment;
  int d = 2;
  int n = 8;
  DisorderModel model = DisorderModel::A;
  PotentialSpec potential;
  DisorderLaw law;
  std::vector<double> tilt;
  std::vector<Site> pinned;
  DynamicsConfig dynamics;
  std::size_t ensemble = 1;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  std::string output_dir = "out";
  std::map<std::string, std::string> params;

  bool has(const std::string& key) const { return params.count(key) != 0; }
  double param(const std::string& key, double fallback) const;
  long param_int(const std::string& key, long fallback) const;
  std::vector<double> param_list(const std::string& key, std::vector<double> fallback = {}) const;
  std::vector<int> param_int_list(const std::string& key, std::vector<int> fallback = {}) const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& p);
// canonical INI text; parse_config(serialize_config(c)) == c
std::string serialize_config(const ExperimentConfig& c);
// throws ConfigError naming the offending key
void validate_config(const ExperimentConfig& c);

std::vector<double> parse_number_list(const std::string& s);
std::string join_numbers(const std::vector<double>& v);

}  // namespace gglab
