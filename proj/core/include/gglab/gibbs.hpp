#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "gglab/disorder.hpp"
#include "gglab/lattice.hpp"
#include "gglab/linalg.hpp"
#include "gglab/potential.hpp"
#include "gglab/rng.hpp"

namespace gglab {

struct BoundarySpec {
  enum class Kind { Zero, Tilt, Custom };

  Kind kind = Kind::Zero;
  std::vector<double> tilt;                         // u, one entry per axis
  std::function<double(const Site&)> custom;        // psi for Kind::Custom
  std::vector<std::pair<Site, double>> pinned;      // explicit values at pinned sites (not used with Tilt)

  static BoundarySpec zero() { return {}; }
  static BoundarySpec tilted(std::vector<double> u);
  static BoundarySpec from_function(std::function<double(const Site&)> f);

  // psi at a frozen site
  double value_at(const Site& x) const;
};

double tilt_value(std::span<const double> u, const Site& x);

// Bond potentials V_e(s) = kappa_e s^2/2 + R(s) on the box edges, plus the
// site field xi and the frozen values psi.
struct GibbsModel {
  std::shared_ptr<const Domain> domain;
  Potential potential{PotentialSpec{}};
  DisorderModel model = DisorderModel::A;
  std::vector<double> kappa;  // per box edge
  std::vector<double> field;  // xi per box site
  std::vector<double> psi;    // per box site, used on frozen sites

  const LatticeBox& box() const { return domain->box(); }
  bool is_quadratic() const { return potential.is_quadratic(); }
  double c1() const;
  double c2() const;
  double bond_value(std::size_t e, double s) const { return 0.5 * kappa[e] * s * s + potential.rest_value(s); }
  double bond_d1(std::size_t e, double s) const { return kappa[e] * s + potential.rest_d1(s); }
  double bond_d2(std::size_t e, double s) const { return kappa[e] + potential.rest_d2(s); }
};

GibbsModel make_model(std::shared_ptr<const Domain> domain, const Potential& potential, const DisorderSample& disorder,
                      const BoundarySpec& boundary);
// no disorder: xi = 0, kappa_e from the potential
GibbsModel make_model(std::shared_ptr<const Domain> domain, const Potential& potential, const BoundarySpec& boundary);

class HeightField {
 public:
  HeightField(std::shared_ptr<const Domain> domain, std::vector<double> values);

  const Domain& domain() const { return *domain_; }
  const std::shared_ptr<const Domain>& domain_ptr() const { return domain_; }
  const LatticeBox& box() const { return domain_->box(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double at(const Site& x) const { return values_[box().index_or_throw(x)]; }

  // (tau_v phi)(y) = phi(y - v) on the shifted domain
  HeightField shifted(const Site& v) const;

 private:
  std::shared_ptr<const Domain> domain_;
  std::vector<double> values_;
};

// psi on frozen sites, 0 on free sites
HeightField initial_field(const GibbsModel& m);

double energy(const HeightField& phi, const GibbsModel& m);
// -dH/dphi(y) for each free site, in free-site order
std::vector<double> drift(const HeightField& phi, const GibbsModel& m);

// Gaussian noise per free site from a counter stream.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t key) : rng_(key) {}
  void fill(std::span<double> g);
  double next() { return normal_(rng_); }
  CounterRng& engine() { return rng_; }

 private:
  CounterRng rng_;
  std::normal_distribution<double> normal_;
};

inline constexpr double kDefaultDivergenceGuard = 1e8;

// Euler-Maruyama for d phi = drift dt + sqrt(2) dW on the free sites.
class LangevinIntegrator {
 public:
  LangevinIntegrator(const GibbsModel& m, double h, double guard = kDefaultDivergenceGuard);

  void step(HeightField& phi, NoiseStream& noise);
  // g: standard normals per free site (scaled by sqrt(2h) inside)
  void step_with_noise(HeightField& phi, std::span<const double> g);
  // test hook: noise switched off
  void step_deterministic(HeightField& phi);
  // drift at the current field into out (free-site order), returns nothing
  void compute_drift(const HeightField& phi, std::span<double> out) const;

  double h() const { return h_; }
  std::size_t free_count() const { return free_.size(); }
  const GibbsModel& model() const { return *m_; }

 private:
  void apply(HeightField& phi, std::span<const double> g, double scale);

  const GibbsModel* m_;
  double h_;
  double guard_;
  int deg_;
  std::vector<std::uint32_t> free_;
  std::vector<std::uint32_t> nbr_;
  std::vector<double> kap_;
  std::vector<double> buf_;
  std::vector<double> noise_;
};

double default_step(const GibbsModel& m);
double default_burn_in(const GibbsModel& m);
std::size_t default_cadence(const GibbsModel& m, double h);

// Exact Gaussian measure for quadratic bond potentials.
class GaussianModel {
 public:
  explicit GaussianModel(const GibbsModel& m, SpdSolver::Method method = SpdSolver::Method::Auto);

  const Vector& mean() const { return mean_; }  // free-site order
  HeightField mean_field() const;
  HeightField sample(NoiseStream& noise) const;
  // (A^{-1})_{xz} for box site indices; 0 if either is frozen
  double covariance(std::size_t x, std::size_t z) const;
  Vector covariance_column(std::size_t z) const;
  // v^T A^{-1} v, v indexed by free site
  double variance_of(const Vector& v) const;
  const SpdSolver& solver() const { return *solver_; }
  const GibbsModel& model() const { return *m_; }

 private:
  const GibbsModel* m_;
  std::shared_ptr<SpdSolver> solver_;
  Vector mean_;
};

struct SamplerConfig {
  double h = 0.0;               // 0: default_step
  double burn_in = -1.0;        // time units; < 0: default_burn_in
  std::size_t thinning = 0;     // steps between samples; 0: default_cadence
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  double guard = kDefaultDivergenceGuard;
  bool noise = true;
};

struct EnergyPoint {
  std::uint64_t step;
  double time;
  double energy;
};

// Burn-in then thinned samples; records the energy at every sample.
class SampleStream {
 public:
  SampleStream(const GibbsModel& m, const SamplerConfig& cfg, HeightField start);

  // advance to the next sample; false once `samples` have been produced
  bool next();
  const HeightField& current() const { return phi_; }
  std::size_t produced() const { return produced_; }
  std::uint64_t steps() const { return steps_; }
  double step_size() const { return integ_.h(); }
  std::size_t thinning() const { return thinning_; }
  const std::vector<EnergyPoint>& energy_trace() const { return trace_; }
  // integrated autocorrelation time of the energy, in samples
  double energy_autocorrelation() const;

 private:
  void advance(std::size_t n);

  const GibbsModel* m_;
  SamplerConfig cfg_;
  LangevinIntegrator integ_;
  NoiseStream noise_;
  HeightField phi_;
  std::size_t thinning_;
  std::size_t burn_steps_;
  std::size_t produced_ = 0;
  std::uint64_t steps_ = 0;
  bool burned_ = false;
  std::vector<EnergyPoint> trace_;
};

SampleStream equilibrate_and_sample(const GibbsModel& m, const SamplerConfig& cfg);

}  // namespace gglab
