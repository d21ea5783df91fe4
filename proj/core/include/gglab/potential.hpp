#pragma once

#include <string>

namespace gglab {

enum class PotentialKind { Quadratic, PerturbedConvex, Mixture };

std::string to_string(PotentialKind k);
PotentialKind parse_potential_kind(const std::string& s);

struct PotentialSpec {
  PotentialKind kind = PotentialKind::Quadratic;
  double kappa = 1.0;   // quadratic
  double eps = 0.0;     // perturbed: s^2/2 + eps*sqrt(1+s^2)
  double p = 0.5;       // mixture: exp(-V) = p e^{-k1 s^2} + (1-p) e^{-k2 s^2}
  double kappa1 = 1.0;
  double kappa2 = 4.0;
  bool exploratory = false;

  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;
};

// Even bond potential V(s) = q*s^2/2 + R(s). The split lets random
// conductances replace q bond by bond while R stays shared.
class Potential {
 public:
  explicit Potential(const PotentialSpec& spec);

  double value(double s) const { return 0.5 * q_ * s * s + rest_value(s); }
  double d1(double s) const { return q_ * s + rest_d1(s); }
  double d2(double s) const { return q_ + rest_d2(s); }

  double quadratic_part() const { return q_; }
  double rest_value(double s) const;
  double rest_d1(double s) const;
  double rest_d2(double s) const;

  // Convexity bounds. For the mixture these are only the range of the two
  // quadratic curvatures (used for step-size defaults), not guarantees.
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  bool uniformly_convex() const { return spec_.kind != PotentialKind::Mixture; }
  bool is_quadratic() const { return spec_.kind == PotentialKind::Quadratic; }
  PotentialKind kind() const { return spec_.kind; }
  const PotentialSpec& spec() const { return spec_; }

 private:
  PotentialSpec spec_;
  double q_ = 0.0;
  double c1_ = 0.0;
  double c2_ = 0.0;
};

Potential make_potential(const PotentialSpec& spec);

}  // namespace gglab
