#include "gglab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "gglab/error.hpp"
#include "gglab/io.hpp"

namespace gglab {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError(key + ": not a number: '" + raw + "'");
  return v;
}

long to_long(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError(key + ": not an integer: '" + raw + "'");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError(key + ": not an unsigned integer: '" + raw + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(key + ": expected true or false");
}

std::vector<Site> parse_sites(const std::string& raw) {
  std::vector<Site> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (trim(item).empty()) continue;
    const auto v = parse_number_list(item);
    if (v.size() > static_cast<std::size_t>(kMaxDim)) throw ConfigError("boundary.pinned: too many coordinates");
    Site x{};
    for (std::size_t a = 0; a < v.size(); ++a) {
      if (v[a] != std::floor(v[a])) throw ConfigError("boundary.pinned: coordinates must be integers");
      x[static_cast<int>(a)] = static_cast<int>(v[a]);
    }
    out.push_back(x);
  }
  return out;
}

std::string join_sites(const std::vector<Site>& sites, int d) {
  std::string s;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (i) s += ";";
    for (int a = 0; a < d; ++a) {
      if (a) s += ",";
      s += std::to_string(sites[i][a]);
    }
  }
  return s;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k = {
      {"experiment", {"name", "seed", "threads"}},
      {"lattice", {"d", "N"}},
      {"model", {"model", "potential", "kappa", "eps", "p", "kappa1", "kappa2", "exploratory"}},
      {"disorder", {"law", "scale", "kappa", "delta"}},
      {"boundary", {"tilt", "pinned"}},
      {"dynamics", {"h", "burn_in", "thinning", "samples"}},
      {"ensemble", {"size"}},
      {"output", {"dir"}},
  };
  return k;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_double("list", item));
  }
  return out;
}

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += format_number(v[i]);
  }
  return s;
}

double ExperimentConfig::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : to_double("params." + key, it->second);
}

long ExperimentConfig::param_int(const std::string& key, long fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : to_long("params." + key, it->second);
}

std::vector<double> ExperimentConfig::param_list(const std::string& key, std::vector<double> fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : parse_number_list(it->second);
}

std::vector<int> ExperimentConfig::param_int_list(const std::string& key, std::vector<int> fallback) const {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  std::vector<int> out;
  for (double v : parse_number_list(it->second)) {
    if (v != std::floor(v)) throw ConfigError("params." + key + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
    if (section == "params") {
      for (const auto& [k, v] : body) c.params[k] = trim(v.data());
      continue;
    }
    const auto ks = known_keys().find(section);
    if (ks == known_keys().end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [k, v] : body) {
      const std::string key = section + "." + k;
      const std::string val = trim(v.data());
      if (!ks->second.count(k)) throw ConfigError("unknown key " + key);
      if (key == "experiment.name") c.experiment = val;
      else if (key == "experiment.seed") c.seed = to_u64(key, val);
      else if (key == "experiment.threads") c.threads = static_cast<int>(to_long(key, val));
      else if (key == "lattice.d") c.d = static_cast<int>(to_long(key, val));
      else if (key == "lattice.N") c.n = static_cast<int>(to_long(key, val));
      else if (key == "model.model") c.model = parse_disorder_model(val);
      else if (key == "model.potential") c.potential.kind = parse_potential_kind(val);
      else if (key == "model.kappa") c.potential.kappa = to_double(key, val);
      else if (key == "model.eps") c.potential.eps = to_double(key, val);
      else if (key == "model.p") c.potential.p = to_double(key, val);
      else if (key == "model.kappa1") c.potential.kappa1 = to_double(key, val);
      else if (key == "model.kappa2") c.potential.kappa2 = to_double(key, val);
      else if (key == "model.exploratory") c.potential.exploratory = to_bool(key, val);
      else if (key == "disorder.law") c.law.kind = parse_disorder_law(val);
      else if (key == "disorder.scale") c.law.scale = to_double(key, val);
      else if (key == "disorder.kappa") c.law.kappa = to_double(key, val);
      else if (key == "disorder.delta") c.law.delta = to_double(key, val);
      else if (key == "boundary.tilt") c.tilt = parse_number_list(val);
      else if (key == "boundary.pinned") c.pinned = parse_sites(val);
      else if (key == "dynamics.h") c.dynamics.h = to_double(key, val);
      else if (key == "dynamics.burn_in") c.dynamics.burn_in = to_double(key, val);
      else if (key == "dynamics.thinning") c.dynamics.thinning = to_u64(key, val);
      else if (key == "dynamics.samples") c.dynamics.samples = to_u64(key, val);
      else if (key == "ensemble.size") c.ensemble = to_u64(key, val);
      else if (key == "output.dir") c.output_dir = val;
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& p) { return parse_config(read_file(p)); }

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream o;
  auto num = [](double v) { return format_number(v); };
  o << "[experiment]\nname = " << c.experiment << "\nseed = " << c.seed << "\nthreads = " << c.threads << "\n\n";
  o << "[lattice]\nd = " << c.d << "\nN = " << c.n << "\n\n";
  o << "[model]\nmodel = " << to_string(c.model) << "\npotential = " << to_string(c.potential.kind)
    << "\nkappa = " << num(c.potential.kappa) << "\neps = " << num(c.potential.eps) << "\np = " << num(c.potential.p)
    << "\nkappa1 = " << num(c.potential.kappa1) << "\nkappa2 = " << num(c.potential.kappa2)
    << "\nexploratory = " << (c.potential.exploratory ? "true" : "false") << "\n\n";
  o << "[disorder]\nlaw = " << to_string(c.law.kind) << "\nscale = " << num(c.law.scale) << "\nkappa = " << num(c.law.kappa)
    << "\ndelta = " << num(c.law.delta) << "\n\n";
  o << "[boundary]\ntilt = " << join_numbers(c.tilt) << "\npinned = " << join_sites(c.pinned, c.d) << "\n\n";
  o << "[dynamics]\nh = " << num(c.dynamics.h) << "\nburn_in = " << num(c.dynamics.burn_in)
    << "\nthinning = " << c.dynamics.thinning << "\nsamples = " << c.dynamics.samples << "\n\n";
  o << "[ensemble]\nsize = " << c.ensemble << "\n\n";
  o << "[output]\ndir = " << c.output_dir << "\n";
  if (!c.params.empty()) {
    o << "\n[params]\n";
    for (const auto& [k, v] : c.params) o << k << " = " << v << "\n";
  }
  return o.str();
}

void validate_config(const ExperimentConfig& c) {
  if (c.experiment.empty()) throw ConfigError("experiment.name is required");
  if (c.d < 1 || c.d > kMaxDim) throw ConfigError("lattice.d must lie in [1, 4]");
  if (c.n < 1) throw ConfigError("lattice.N must be >= 1");
  try {
    make_potential(c.potential);
    validate_law(c.model, c.law);
  } catch (const Error& e) {
    throw ConfigError(std::string("model/disorder: ") + e.what());
  }
  if (c.model == DisorderModel::B && c.potential.kind == PotentialKind::Mixture)
    throw ConfigError("model.potential: the mixture potential is only available for model A");
  if (!c.tilt.empty() && c.tilt.size() != static_cast<std::size_t>(c.d))
    throw ConfigError("boundary.tilt needs one entry per axis");
  for (double u : c.tilt)
    if (!std::isfinite(u)) throw ConfigError("boundary.tilt must be finite");
  for (const Site& x : c.pinned) {
    for (int a = c.d; a < kMaxDim; ++a)
      if (x[a] != 0) throw ConfigError("boundary.pinned: site has more coordinates than d");
    if (sup_norm(x) > c.n) throw ConfigError("boundary.pinned: site " + to_string(x, c.d) + " outside the box");
  }
  if (!(c.dynamics.h >= 0) || !std::isfinite(c.dynamics.h)) throw ConfigError("dynamics.h must be >= 0");
  if (!std::isfinite(c.dynamics.burn_in)) throw ConfigError("dynamics.burn_in must be finite");
  if (c.dynamics.samples < 1) throw ConfigError("dynamics.samples must be >= 1");
  if (c.ensemble < 1) throw ConfigError("ensemble.size must be >= 1");
  if (c.threads < 0) throw ConfigError("experiment.threads must be >= 0");
  if (c.output_dir.empty()) throw ConfigError("output.dir must not be empty");
  for (const auto& [k, v] : c.params)
    if (v.find('\n') != std::string::npos) throw ConfigError("params." + k + ": multi-line values are not allowed");
}

}  // namespace gglab
