#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gglab/disorder.hpp"
#include "gglab/gibbs.hpp"
#include "gglab/green.hpp"
#include "gglab/lattice.hpp"
#include "gglab/stats.hpp"

namespace gglab {

// ---- tilt ---------------------------------------------------------------

// Orientation note: eta(b) = phi(y_b) - phi(x_b). The forward bond
// (x, x + e_a) has mean +u_a under a tilt-u boundary; the reversed bond
// (x + e_a, x) used in the source's definition of the tilt has mean -u_a.
struct TiltReport {
  double forward = 0.0;            // window mean of phi(x + e_a) - phi(x)
  double reversed = 0.0;           // = -forward
  double se = 0.0;
  std::size_t samples = 0;
  std::string orientation;
  std::string proxy;
};

// (1/|Lambda_n|) sum over x in the centred window of phi(x + e_a) - phi(x)
double window_tilt(const HeightField& phi, int axis, int n);
TiltReport tilt_estimate(SampleStream& stream, int axis, int n, std::size_t batches = kDefaultBatches);

// ---- Brascamp-Lieb --------------------------------------------------------

struct BrascampLiebReport {
  double variance = 0.0;           // var_mu(v . phi)
  double variance_se = 0.0;
  double gaussian_variance = 0.0;  // var under V0(s) = s^2/2, same domain
  double c1 = 1.0;
  double ratio = 0.0;              // variance / (gaussian_variance / c1)
  double ratio_se = 0.0;
  double bound = 1.0;              // 1 + 3 * relative stderr
  bool within_bound = false;
};

// variance with stderr from delete-one-batch jackknife on (mean x, mean x^2)
JackknifeResult batch_variance(std::span<const double> series, std::size_t batches = kDefaultBatches);

// v indexed by box site; only free-site entries matter
double gaussian_reference_variance(const GibbsModel& m, std::span<const double> v);
BrascampLiebReport brascamp_lieb_ratio(std::span<const double> functional_series, double gaussian_variance, double c1,
                                       std::size_t batches = kDefaultBatches);

// ---- Langevin accuracy ----------------------------------------------------

struct LangevinCheckRow {
  Site probe;
  double exact = 0.0;
  double var_h = 0.0, se_h = 0.0;
  double var_half = 0.0, se_half = 0.0;
  double bias = 0.0;  // var_h - var_half
};

struct LangevinCheckReport {
  double h = 0.0;
  double total_time = 0.0;
  std::vector<LangevinCheckRow> rows;
};

// Two chains share one Brownian path: step h uses the sum of the two h/2
// increments of the fine chain. Both start from one exact Gaussian sample.
LangevinCheckReport langevin_step_refinement_check(const GibbsModel& m, const std::vector<Site>& probes, double h,
                                                   double total_time, std::uint64_t seed,
                                                   std::size_t batches = kDefaultBatches);

// ---- pinning --------------------------------------------------------------

struct PinnedProfileRow {
  int a = 0;                  // probe a * e_1
  double var_pinned = 0.0;    // zero outside Lambda_N and at the origin
  double var_region = 0.0;    // zero outside {b : |a - b|_inf <= |b|_inf} within Lambda_N
  double ratio = 0.0;
};

struct PinnedProfile {
  int d = 0;
  int n = 0;
  std::vector<PinnedProfileRow> rows;
  LinearFit fit;              // var against |a| (d = 1) or log|a| (d = 2)
  std::string regressor;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
};

PinnedProfile pinned_variance_profile(int d, int N, const std::vector<int>& probes);

// ---- local bond observables ------------------------------------------------

// F = sum w_i eta(b_i), or its square
struct LocalObservable {
  std::vector<Bond> bonds;
  std::vector<double> weights;
  bool square = false;

  static LocalObservable bond(const Bond& b, bool square = false) { return {{b}, {1.0}, square}; }
  double operator()(const HeightField& phi) const;
};

Bond axis_bond(const Site& x, int axis);
// window-averaged forward gradient along `axis` over the centred Lambda_n
LocalObservable window_gradient(const LatticeBox& box, int axis, int n);

// Exact quenched mean and variance of a local observable under a Gaussian model
struct QuenchedEstimate {
  double mean = 0.0;
  double mean_se = 0.0;
  double var = 0.0;
  double var_se = 0.0;
};

QuenchedEstimate quenched_exact(const GaussianModel& g, const LocalObservable& f);

// ---- annealed covariance decay ------------------------------------------------

struct EnsembleSpec {
  int d = 2;
  int n = 8;
  Potential potential{PotentialSpec{}};
  DisorderModel model = DisorderModel::A;
  DisorderLaw law;
  std::vector<double> tilt;
  SamplerConfig sampler;       // used when the potential is not quadratic
  std::size_t ensemble = 32;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct CovarianceDecayReport {
  std::vector<double> separations;
  std::vector<double> values;
  std::vector<double> se;            // 0 for exact values
  double exponent = 0.0;             // |Cov| ~ s^{-exponent}
  double exponent_drop_first = 0.0;  // refit without the smallest separation
  double r2 = 0.0;
  std::string method;
};

void fit_decay(CovarianceDecayReport& rep);

// Annealed Cov(E_w F, E_w G_s) over the disorder ensemble. Quenched
// expectations are exact for quadratic potentials, Langevin otherwise.
CovarianceDecayReport annealed_covariance_decay(const EnsembleSpec& spec, const LocalObservable& f,
                                                const std::vector<LocalObservable>& g,
                                                const std::vector<double>& separations);

// Model A, quadratic kappa, Var(xi) = sigma2: exact
//   Cov = sigma2 * sum_z grad_b A^{-1}(., z) grad_b' A^{-1}(., z)
// on the box (finite) or for the whole lattice (whole_space, d >= 3, unit
// box conductances) with the outer sum taken to `outer_radius` plus the
// analytic dipole tail.
CovarianceDecayReport model_a_exact_covariance(int d, int N, double kappa, double sigma2, const Bond& b,
                                               const std::vector<Bond>& partners, const std::vector<double>& separations,
                                               bool whole_space = false, double outer_radius = 96.0);

// Var over xi of the exact quenched mean of eta(b) on Lambda_N (model A)
double model_a_gradient_mean_variance(int d, int N, double kappa, double sigma2, const Bond& b);

// First-order expansion in the conductance fluctuation for model B with
// F = eta(b)^2, G = eta(b')^2 at zero boundary:
//   Cov = Var(kappa_e) * sum_e (grad_e A0^{-1} grad_b)^2 (grad_e A0^{-1} grad_b')^2
std::vector<double> model_b_first_order_covariance(int d, int N, double kappa, double delta, const Bond& b,
                                                   const std::vector<Bond>& partners);

// ---- quenched / annealed split ------------------------------------------------

struct QuenchedAnnealedReport {
  std::vector<QuenchedEstimate> per_disorder;
  double target = 0.0;
  double mean_quenched_var = 0.0;   // E[var_w X]
  double var_quenched_mean = 0.0;   // Var[E_w X] (1/K normalisation)
  double bias_sq = 0.0;             // (E[E_w X] - target)^2
  double total = 0.0;               // E[E_w (X - target)^2]
  double se_mean_quenched_var = 0.0;
  double se_var_quenched_mean = 0.0;
  double se_bias_sq = 0.0;
  double se_total = 0.0;
};

QuenchedAnnealedReport quenched_annealed_decompose(const std::vector<QuenchedEstimate>& per_disorder, double target);
// per-disorder quenched estimates (exact for quadratic, Langevin otherwise)
std::vector<QuenchedEstimate> quenched_ensemble(const EnsembleSpec& spec, const LocalObservable& x);

// ---- appendix convolution sums ------------------------------------------------

enum class ConvolutionKind {
  Gradient,  // exponents d-1, normalised by |x - z|^{d-2}
  Second,    // exponents d, normalised by |x - z|^d
};

struct ConvolutionRow {
  double radius = 0.0;
  std::vector<double> normalized;  // per separation
  double sup = 0.0;
  double diagonal = 0.0;           // sum over y of |y|^{-2p}
};

struct ConvolutionReport {
  int d = 0;
  ConvolutionKind kind = ConvolutionKind::Gradient;
  std::vector<int> separations;
  std::vector<ConvolutionRow> rows;
  std::vector<double> relative_change;  // |sup_{k+1} / sup_k - 1|
};

ConvolutionReport convolution_bound_check(int d, ConvolutionKind kind, const std::vector<double>& radii,
                                          const std::vector<int>& separations);

}  // namespace gglab
