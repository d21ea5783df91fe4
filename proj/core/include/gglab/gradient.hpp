#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gglab/disorder.hpp"
#include "gglab/error.hpp"
#include "gglab/gibbs.hpp"
#include "gglab/lattice.hpp"

namespace gglab {

// eta on the directed bonds of Lambda* and the boundary bonds, stored once per
// undirected edge in the lo -> hi orientation; eta(-b) = -eta(b) by construction.
class GradientField {
 public:
  GradientField(std::shared_ptr<const LatticeBox> box, std::vector<double> edge_values);

  const LatticeBox& box() const { return *box_; }
  const std::shared_ptr<const LatticeBox>& box_ptr() const { return box_; }
  double operator()(const Bond& b) const;
  double edge(std::size_t e) const { return values_[e]; }
  const std::vector<double>& edge_values() const { return values_; }
  std::size_t directed_count() const { return 2 * values_.size(); }

  // (tau_v eta)(b) = eta(b - v) on box + v
  GradientField shifted(const Site& v) const;

 private:
  std::shared_ptr<const LatticeBox> box_;
  std::vector<double> values_;
};

GradientField gradient_of(const HeightField& phi);
// eta(b) = u . (y_b - x_b)
GradientField tilt_field(std::shared_ptr<const LatticeBox> box, std::span<const double> u);

class PlaquetteError : public Error {
 public:
  PlaquetteError(const std::string& what, std::size_t worst, double residual)
      : Error(what), worst_(worst), residual_(residual) {}
  std::size_t worst_plaquette() const { return worst_; }
  double residual() const { return residual_; }

 private:
  std::size_t worst_;
  double residual_;
};

struct PlaquetteReport {
  double worst = 0.0;       // largest |signed loop sum|
  std::size_t worst_index = 0;
  double tolerance = 0.0;   // rel_tol * max(1, max|eta|)
  bool ok = true;
};

inline constexpr double kPlaquetteTolerance = 1e-9;

PlaquetteReport check_plaquettes(const GradientField& eta, double rel_tol = kPlaquetteTolerance);

// Heights from eta by summing along a staircase chain from the box center:
// axes are walked in `axis_order`, except that an axis on which the target
// sits outside the interior is walked last. Refuses eta violating the
// plaquette condition.
HeightField reconstruct(const GradientField& eta, double phi0, std::vector<int> axis_order = {});
std::vector<double> reconstruct_values(const GradientField& eta, double phi0, std::vector<int> axis_order = {});

// sum over directed bonds of exp(-2 r ||x_b||_inf) (eta1(b) - eta2(b))^2
double weighted_distance(const GradientField& a, const GradientField& b, double r);
double weighted_norm_sq(const GradientField& a, double r);
// same functional evaluated straight from two height fields on one box
double weighted_distance(const HeightField& a, const HeightField& b, double r);

// Bond functional with bounded support, fed the eta values on its support.
struct BondObservable {
  std::vector<Bond> support;
  std::function<double(std::span<const double>)> f;
  std::vector<double> linear_weights;  // non-empty: F = sum w_i eta(b_i)

  static BondObservable single(const Bond& b);
  static BondObservable linear(std::vector<Bond> bonds, std::vector<double> w);
  double operator()(const HeightField& phi) const;
};

enum class AverageMode { Langevin, ExactMean };

struct SpatialAverageConfig {
  Potential potential{PotentialSpec{}};
  DisorderModel model = DisorderModel::A;
  DisorderLaw law;
  std::uint64_t disorder_seed = 1;
  std::vector<double> tilt;            // empty: zero boundary
  SamplerConfig sampler;               // sampler.seed is the master seed
  AverageMode mode = AverageMode::Langevin;
  std::vector<int> volume_sequence;    // empty: base box only; else outer average over these N
  int threads = 1;
};

struct SpatialAverageResult {
  double estimate = 0.0;
  double se = 0.0;
  std::vector<double> per_shift;       // concatenated over the volume sequence
  std::vector<double> per_shift_se;
  bool complete = true;
  std::string failure;
};

SpatialAverageResult spatial_average_observable(const BondObservable& F, const LatticeBox& base,
                                                const std::vector<Site>& shifts, const SpatialAverageConfig& cfg);

}  // namespace gglab
