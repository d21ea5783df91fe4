#include "gglab/potential.hpp"

#include <algorithm>
#include <cmath>

#include "gglab/error.hpp"

namespace gglab {

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::Quadratic: return "quadratic";
    case PotentialKind::PerturbedConvex: return "perturbed";
    case PotentialKind::Mixture: return "mixture";
  }
  return "?";
}

PotentialKind parse_potential_kind(const std::string& s) {
  if (s == "quadratic") return PotentialKind::Quadratic;
  if (s == "perturbed") return PotentialKind::PerturbedConvex;
  if (s == "mixture") return PotentialKind::Mixture;
  throw ConfigError("unknown potential kind '" + s + "'");
}

namespace {

// log-sum-exp weights of the two Gaussian components at s
struct MixTerms {
  double logz;
  double w1;
  double w2;
};

MixTerms mix_terms(const PotentialSpec& sp, double s) {
  const double a1 = sp.p > 0 ? std::log(sp.p) - sp.kappa1 * s * s : -INFINITY;
  const double a2 = sp.p < 1 ? std::log1p(-sp.p) - sp.kappa2 * s * s : -INFINITY;
  const double m = std::max(a1, a2);
  const double e1 = std::exp(a1 - m), e2 = std::exp(a2 - m);
  const double z = e1 + e2;
  return {m + std::log(z), e1 / z, e2 / z};
}

}  // namespace

Potential::Potential(const PotentialSpec& spec) : spec_(spec) {
  switch (spec.kind) {
    case PotentialKind::Quadratic:
      if (!(spec.kappa > 0)) throw ConfigError("quadratic potential needs kappa > 0");
      q_ = spec.kappa;
      c1_ = c2_ = spec.kappa;
      break;
    case PotentialKind::PerturbedConvex:
      if (!(spec.eps >= 0)) throw ConfigError("perturbed potential needs eps >= 0");
      q_ = 1.0;
      c1_ = 1.0;
      c2_ = 1.0 + spec.eps;
      break;
    case PotentialKind::Mixture:
      if (!(spec.p >= 0 && spec.p <= 1)) throw ConfigError("mixture weight p must lie in [0, 1]");
      if (!(spec.kappa1 > 0 && spec.kappa2 > 0)) throw ConfigError("mixture curvatures must be positive");
      if (!spec.exploratory) throw ConfigError("mixture potential requires the exploratory flag");
      q_ = 0.0;
      c1_ = 2.0 * std::min(spec.kappa1, spec.kappa2);
      c2_ = 2.0 * std::max(spec.kappa1, spec.kappa2);
      break;
  }
}

double Potential::rest_value(double s) const {
  switch (spec_.kind) {
    case PotentialKind::Quadratic: return 0.0;
    case PotentialKind::PerturbedConvex: return spec_.eps * std::sqrt(1.0 + s * s);
    case PotentialKind::Mixture: return -mix_terms(spec_, s).logz;
  }
  return 0.0;
}

double Potential::rest_d1(double s) const {
  switch (spec_.kind) {
    case PotentialKind::Quadratic: return 0.0;
    case PotentialKind::PerturbedConvex: return spec_.eps * s / std::sqrt(1.0 + s * s);
    case PotentialKind::Mixture: {
      const auto t = mix_terms(spec_, s);
      return 2.0 * s * (t.w1 * spec_.kappa1 + t.w2 * spec_.kappa2);
    }
  }
  return 0.0;
}

double Potential::rest_d2(double s) const {
  switch (spec_.kind) {
    case PotentialKind::Quadratic: return 0.0;
    case PotentialKind::PerturbedConvex: {
      const double u = 1.0 + s * s;
      return spec_.eps / (u * std::sqrt(u));
    }
    case PotentialKind::Mixture: {
      const auto t = mix_terms(spec_, s);
      const double k1 = spec_.kappa1, k2 = spec_.kappa2;
      const double v1 = 2.0 * s * (t.w1 * k1 + t.w2 * k2);
      return 2.0 * (t.w1 * k1 + t.w2 * k2) - 4.0 * s * s * (t.w1 * k1 * k1 + t.w2 * k2 * k2) + v1 * v1;
    }
  }
  return 0.0;
}

Potential make_potential(const PotentialSpec& spec) { return Potential(spec); }

}  // namespace gglab
