#include "gglab/disorder.hpp"

#include <random>

#include "gglab/error.hpp"
#include "gglab/rng.hpp"

namespace gglab {

std::string to_string(DisorderModel m) { return m == DisorderModel::A ? "A" : "B"; }

std::string to_string(DisorderLawKind k) {
  switch (k) {
    case DisorderLawKind::Gaussian: return "gaussian";
    case DisorderLawKind::Rademacher: return "rademacher";
    case DisorderLawKind::Uniform: return "uniform";
    case DisorderLawKind::Conductance: return "conductance";
  }
  return "?";
}

DisorderModel parse_disorder_model(const std::string& s) {
  if (s == "A" || s == "a") return DisorderModel::A;
  if (s == "B" || s == "b") return DisorderModel::B;
  throw ConfigError("model must be A or B, got '" + s + "'");
}

DisorderLawKind parse_disorder_law(const std::string& s) {
  if (s == "gaussian") return DisorderLawKind::Gaussian;
  if (s == "rademacher") return DisorderLawKind::Rademacher;
  if (s == "uniform") return DisorderLawKind::Uniform;
  if (s == "conductance") return DisorderLawKind::Conductance;
  throw ConfigError("unknown disorder law '" + s + "'");
}

double law_variance(const DisorderLaw& law) {
  switch (law.kind) {
    case DisorderLawKind::Gaussian:
    case DisorderLawKind::Rademacher: return law.scale * law.scale;
    case DisorderLawKind::Uniform: return law.scale * law.scale / 3.0;
    case DisorderLawKind::Conductance: return law.kappa * law.kappa * law.delta * law.delta / 3.0;
  }
  return 0.0;
}

void validate_law(DisorderModel model, const DisorderLaw& law) {
  if (model == DisorderModel::A) {
    if (law.kind == DisorderLawKind::Conductance) throw ConfigError("model A needs a symmetric site-field law");
    if (!(law.scale >= 0)) throw ConfigError("disorder scale must be >= 0");
  } else {
    if (law.kind != DisorderLawKind::Conductance) throw ConfigError("model B needs the bounded conductance law");
    if (!(law.kappa > 0)) throw ConfigError("conductance kappa must be > 0");
    if (!(law.delta >= 0 && law.delta < 1)) throw ConfigError("conductance delta must lie in [0, 1)");
  }
}

namespace {

double draw(const DisorderLaw& law, std::uint64_t key) {
  CounterRng rng(key);
  switch (law.kind) {
    case DisorderLawKind::Gaussian: {
      if (law.scale == 0) return 0.0;
      std::normal_distribution<double> g(0.0, law.scale);
      return g(rng);
    }
    case DisorderLawKind::Rademacher: return (rng() >> 63) ? law.scale : -law.scale;
    case DisorderLawKind::Uniform: {
      std::uniform_real_distribution<double> u(-law.scale, law.scale);
      return u(rng);
    }
    case DisorderLawKind::Conductance: {
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      return law.kappa * (1.0 + law.delta * u(rng));
    }
  }
  return 0.0;
}

}  // namespace

DisorderSample sample_disorder(DisorderModel model, std::shared_ptr<const LatticeBox> box, const DisorderLaw& law,
                               std::uint64_t seed) {
  validate_law(model, law);
  DisorderSample out;
  out.model = model;
  out.law = law;
  out.seed = seed;
  out.box = box;
  const auto tag = static_cast<std::uint64_t>(StreamTag::Disorder);
  if (model == DisorderModel::A) {
    out.values.resize(box->site_count());
    for (std::size_t i = 0; i < box->site_count(); ++i)
      out.values[i] = draw(law, derive_key(seed, tag, site_key(box->site(i))));
  } else {
    out.values.resize(box->edges().size());
    for (std::size_t e = 0; e < box->edges().size(); ++e) {
      const Edge& ed = box->edges()[e];
      out.values[e] = draw(law, derive_key(seed, tag, site_key(box->site(ed.lo)), static_cast<std::uint64_t>(ed.axis)));
    }
  }
  return out;
}

DisorderSample no_disorder(DisorderModel model, std::shared_ptr<const LatticeBox> box, double kappa) {
  DisorderSample out;
  out.model = model;
  out.box = box;
  if (model == DisorderModel::A) {
    out.law = {DisorderLawKind::Gaussian, 0.0, kappa, 0.0};
    out.values.assign(box->site_count(), 0.0);
  } else {
    out.law = {DisorderLawKind::Conductance, 0.0, kappa, 0.0};
    out.values.assign(box->edges().size(), kappa);
  }
  return out;
}

DisorderSample DisorderSample::negated() const {
  DisorderSample out = *this;
  if (model == DisorderModel::A) {
    out.negated_stream = !negated_stream;
    for (double& v : out.values) v = -v;
  }
  return out;
}

DisorderSample DisorderSample::shifted(const Site& v) const {
  DisorderSample out = *this;
  auto target = std::make_shared<const LatticeBox>(box->shifted(v));
  const auto map = shift_index_map(*box, *target, v);
  out.box = target;
  if (model == DisorderModel::A) {
    for (std::size_t i = 0; i < map.size(); ++i) out.values[i] = values[map[i]];
  } else {
    for (std::size_t e = 0; e < target->edges().size(); ++e) {
      const Edge& ed = target->edges()[e];
      out.values[e] = values[box->up_edge(map[ed.lo], ed.axis)];
    }
  }
  return out;
}

}  // namespace gglab
