#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "gglab/error.hpp"
#include "gglab/gibbs.hpp"
#include "gglab/lattice.hpp"
#include "gglab/linalg.hpp"

namespace gglab {

// Visits: (I - P)^{-1}, P the walk jumping across edge e with probability
//   kappa_e / D(x). Equals A^{-1} D(y).
// OccupationTime: expected time at y of the continuous-time walk with jump
//   rate kappa_e across e. Equals A^{-1}.
// PrecisionInverse: A^{-1} itself (Gaussian covariance).
enum class GreenNormalization { Visits, OccupationTime, PrecisionInverse };

std::string to_string(GreenNormalization n);

class GreenTable {
 public:
  GreenTable(std::shared_ptr<const Domain> dom, std::vector<double> kappa, GreenNormalization norm,
             SpdSolver::Method method = SpdSolver::Method::Auto);

  GreenNormalization normalization() const { return norm_; }
  const Domain& domain() const { return *dom_; }
  const std::shared_ptr<const Domain>& domain_ptr() const { return dom_; }
  const std::vector<double>& kappa() const { return shared_->kappa; }
  const SpdSolver& solver() const { return *shared_->solver; }

  // box site indices; 0 when either site is frozen
  double operator()(std::size_t x, std::size_t y) const;
  double at(const Site& x, const Site& y) const;
  // G(., y) over the free sites (free order) in this table's normalization
  Vector column(std::size_t y) const;
  // G(., y) over all box sites, 0 on frozen sites
  std::vector<double> column_on_box(std::size_t y) const;
  Eigen::MatrixXd dense() const;

  // sum of kappa over the edges at box site y
  double degree(std::size_t y) const;
  // factor f with G_to(x, y) = f * G_from(x, y)
  double conversion_factor(std::size_t y, GreenNormalization to) const;
  GreenTable converted(GreenNormalization to) const;

 private:
  struct Shared {
    std::vector<double> kappa;
    std::unique_ptr<SpdSolver> solver;
    std::mutex mu;
    std::map<std::uint32_t, std::shared_ptr<const Vector>> cache;
  };
  std::shared_ptr<const Vector> precision_column(std::size_t y) const;

  std::shared_ptr<const Domain> dom_;
  GreenNormalization norm_;
  std::shared_ptr<Shared> shared_;
};

// Simple random walk killed on the frozen sites, visits normalization.
GreenTable srw_green_exact(std::shared_ptr<const Domain> dom);
GreenTable srw_green_exact(std::shared_ptr<const LatticeBox> box);

// max |((I - P) G - I)(x, y)| over free x, y (dense; small domains only)
double visits_residual(const GreenTable& visits);

// G_{B_N}(0, 0), B_N = {|x| < N}, visits normalization, for each N.
std::vector<double> green_center_growth(int d, const std::vector<int>& sizes);

// a_d |r|^{2-d} with a_d = 2 / ((d-2) w_d), w_d the unit-ball volume (d >= 3)
double whole_space_asymptote(int d, double r);

// Whole-space column G(., z) restricted to the free sites, from the exact
// identity G = G_dom + (harmonic extension of G on the frozen sites),
// with G on the frozen sites replaced by its far-field asymptote. Needs
// unit conductances and d >= 3. Same normalization as the table.
Vector whole_space_column(const GreenTable& table, const Site& z);

// Piecewise-constant rates a(t, e) on the box edges; slice k is active on
// [times[k], times[k+1]), the last slice beyond its start.
class DynamicEnvironment {
 public:
  DynamicEnvironment(std::shared_ptr<const Domain> dom, std::vector<double> times, std::vector<std::vector<double>> rates,
                     double horizon);

  static DynamicEnvironment static_rates(std::shared_ptr<const Domain> dom, std::vector<double> kappa);
  // a(t, e) = V_e''(grad phi_t(e)) along a Langevin trajectory started at
  // `start`, one slice every `spacing` steps up to time T
  static DynamicEnvironment from_trajectory(const GibbsModel& m, HeightField start, double T, double h,
                                            std::size_t spacing, std::uint64_t seed);

  const Domain& domain() const { return *dom_; }
  std::size_t slices() const { return times_.size(); }
  double slice_start(std::size_t k) const { return times_[k]; }
  const std::vector<double>& rates(std::size_t k) const { return rates_[k]; }
  double horizon() const { return horizon_; }
  bool within(double lo, double hi) const;

 private:
  std::shared_ptr<const Domain> dom_;
  std::vector<double> times_;
  std::vector<std::vector<double>> rates_;
  double horizon_;
};

class HorizonError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct HsWalkResult {
  double estimate = 0.0;   // occupation time at z, i.e. g(x, z)
  double se = 0.0;
  double beyond_horizon = 0.0;  // fraction of walkers alive at the horizon
  std::size_t walkers = 0;
};

inline constexpr double kHorizonMassLimit = 0.01;

HsWalkResult hs_walk_green(const DynamicEnvironment& env, const Site& x, const Site& z, std::size_t walkers,
                           std::uint64_t seed, int threads = 1);

struct AnnulusRow {
  double radius = 0.0;
  std::size_t sites = 0;
  double grad_sq_sum = 0.0;    // sum over shell and axes of (grad_a g(x, z))^2
  double mixed_sq_sum = 0.0;   // sum over shell and axis pairs of (grad_a^x grad_b^z g)^2
  double grad_max = 0.0;       // max over shell and axes of |grad_a g(x, z)|
};

struct PowerFit {
  double exponent = 0.0;  // value ~ constant * R^exponent
  double constant = 0.0;
  double r2 = 0.0;
};

struct GreenGradientReport {
  std::vector<AnnulusRow> rows;
  PowerFit grad_fit;
  PowerFit mixed_fit;
  PowerFit pointwise_fit;
};

// Shells R <= |x - z| <= 2R (Euclidean); a site on the edge of two shells
// goes to the lower one.
GreenGradientReport green_gradient_diagnostics(const GreenTable& table, const Site& z, const std::vector<double>& radii);

PowerFit fit_power(const std::vector<double>& r, const std::vector<double>& v);

}  // namespace gglab
