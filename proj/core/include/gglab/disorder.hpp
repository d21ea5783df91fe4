#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gglab/lattice.hpp"

namespace gglab {

enum class DisorderModel { A, B };
enum class DisorderLawKind { Gaussian, Rademacher, Uniform, Conductance };

std::string to_string(DisorderModel m);
std::string to_string(DisorderLawKind k);
DisorderModel parse_disorder_model(const std::string& s);
DisorderLawKind parse_disorder_law(const std::string& s);

// Model A: xi ~ Gaussian(0, scale^2) | scale * Rademacher | Uniform[-scale, scale].
// Model B: kappa_b = kappa * (1 + delta * u), u ~ Uniform[-1, 1].
struct DisorderLaw {
  DisorderLawKind kind = DisorderLawKind::Gaussian;
  double scale = 0.0;
  double kappa = 1.0;
  double delta = 0.0;

  friend bool operator==(const DisorderLaw&, const DisorderLaw&) = default;
};

double law_variance(const DisorderLaw& law);
void validate_law(DisorderModel model, const DisorderLaw& law);

// Quenched realization. Model A values are per box site, model B values per
// box edge (absolute conductance). Values are keyed by absolute lattice
// position, so overlapping boxes see the same environment.
struct DisorderSample {
  DisorderModel model = DisorderModel::A;
  DisorderLaw law;
  std::uint64_t seed = 0;
  bool negated_stream = false;
  std::shared_ptr<const LatticeBox> box;
  std::vector<double> values;

  double field(std::size_t site) const { return model == DisorderModel::A ? values[site] : 0.0; }
  double conductance(std::size_t edge) const { return values[edge]; }

  // -xi for model A (the sign-flipped stream); model B is returned unchanged.
  DisorderSample negated() const;
  // (tau_v xi)(y) = xi(y - v), living on box + v
  DisorderSample shifted(const Site& v) const;
};

DisorderSample sample_disorder(DisorderModel model, std::shared_ptr<const LatticeBox> box, const DisorderLaw& law,
                               std::uint64_t seed);
// xi = 0 (model A) or kappa_b = kappa (model B)
DisorderSample no_disorder(DisorderModel model, std::shared_ptr<const LatticeBox> box, double kappa = 1.0);

}  // namespace gglab
