// One line per acceptance criterion. Tolerances are the constants below;
// runtimes are checked against the declared limits.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gglab/coupling.hpp"
#include "gglab/estimators.hpp"
#include "gglab/gradient.hpp"
#include "gglab/green.hpp"
#include "gglab/parallel.hpp"
#include "oracles.hpp"

using namespace gglab;

namespace {

// criterion 1
constexpr double kChainTol = 1e-10;
constexpr int kChainMax = 64;
// criterion 2
constexpr int kAsymN = 24;
constexpr double kAsymLo = 8, kAsymHi = 12, kAsymTol = 0.10;
constexpr double kBesselTol = 0.01;
// criterion 3
constexpr double kLogTol = 0.10;
// criterion 4
constexpr std::size_t kWalkers = 100000;
constexpr double kHsSigmas = 3.0;
// criterion 5
constexpr double kLangevinH = 0.01, kLangevinT = 5e4, kLangevinSigmas = 3.0, kBiasSigmas = 1.0;
// criterion 6
constexpr std::size_t kBlSamples = 20000;
// criterion 7
constexpr double kRateTol = 0.05, kRateFloor = 1.8, kCouplingT = 200.0, kCouplingR = 0.05;
// criterion 8
constexpr double kExactTiltTol = 1e-10, kTiltSigmas = 3.0;
constexpr std::size_t kTiltEnsemble = 32, kTiltSamples = 200;
// criterion 9
constexpr double kExponentA = 1.0, kExponentATol = 0.3, kFourierTol = 0.01;
// criterion 10
constexpr std::size_t kEnsembleB = 1024;
constexpr double kExponentBMin = 1.5, kOracleSigmas = 3.0;
// criterion 11
constexpr double kBoundedTol = 0.02;
// criterion 12
constexpr double kR2Line = 0.99, kR2Log = 0.95, kRatioLo = 1.0 / 3.0, kRatioHi = 3.0;
// criterion 13
constexpr double kConvTol = 0.05;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << (ok ? "" : "FAILED ") << what;
  }
};

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::shared_ptr<const Domain> domain(int d, int N) {
  return std::make_shared<const Domain>(std::make_shared<const LatticeBox>(d, N));
}

PotentialSpec perturbed() {
  PotentialSpec p;
  p.kind = PotentialKind::PerturbedConvex;
  p.eps = 0.5;
  return p;
}

// ---- 1 ----
void chain_closed_form(Outcome& o) {
  double worst = 0;
  for (int n = 1; n <= kChainMax; ++n) {
    const int half = n % 2 ? (n - 1) / 2 : n / 2;
    auto box = std::make_shared<const LatticeBox>(1, std::max(half, 1));
    std::function<bool(const Site&)> keep = [&](const Site& x) { return n % 2 ? true : x[0] < half; };
    if (n == 1) keep = [](const Site& x) { return x[0] == 0; };
    auto dom = std::make_shared<const Domain>(Domain::where(box, keep));
    const GreenTable g = srw_green_exact(dom);
    const int lo = box->site(dom->free_sites().front())[0];
    for (auto i : dom->free_sites())
      for (auto j : dom->free_sites())
        worst = std::max(worst, std::abs(g(i, j) - oracle::chain_green(n, box->site(i)[0] - lo + 1, box->site(j)[0] - lo + 1)));
  }
  o.require(worst <= kChainTol, "max |G - closed form| " + fmt(worst) + " (tol " + fmt(kChainTol) + ")");
}

// ---- 2 ----
void green_asymptotics(Outcome& o) {
  auto box = std::make_shared<const LatticeBox>(3, kAsymN);
  auto dom = std::make_shared<const Domain>(box);
  const GreenTable g(dom, std::vector<double>(box->edges().size(), 1.0), GreenNormalization::Visits,
                     SpdSolver::Method::Iterative);
  const Vector whole = whole_space_column(g, Site{});
  const auto o0 = box->index_or_throw(Site{});
  const Vector raw = g.column(o0);
  const double a3 = 3.0 / (2.0 * std::numbers::pi);
  double worst = 0, raw_lo = 1e9, raw_hi = 0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < dom->free_count(); ++k) {
    const Site& x = box->site(dom->free_sites()[k]);
    const double r = euclidean_norm(x);
    if (r < kAsymLo || r > kAsymHi) continue;
    worst = std::max(worst, std::abs(r * whole(k) / a3 - 1.0));
    raw_lo = std::min(raw_lo, r * raw(k) / a3);
    raw_hi = std::max(raw_hi, r * raw(k) / a3);
    ++n;
  }
  o.require(n > 0 && worst <= kAsymTol, "max |r G / (3/2pi) - 1| " + fmt(worst) + " over " + std::to_string(n) + " sites (tol " +
                                            fmt(kAsymTol) + ")");
  double bessel = 0;
  for (const Site& x : {make_site({8, 0, 0}), make_site({6, 6, 3}), make_site({12, 0, 0})}) {
    const double want = oracle::whole_space_green(3, x);
    bessel = std::max(bessel, std::abs(whole(dom->free_index(box->index_or_throw(x))) / want - 1.0));
  }
  o.require(bessel <= kBesselTol, "Bessel oracle rel dev " + fmt(bessel));
  o.detail << "; box-only ratios " << fmt(raw_lo, 3) << ".." << fmt(raw_hi, 3);
}

// ---- 3 ----
void log_growth(Outcome& o) {
  const auto g = green_center_growth(2, {8, 16, 32, 64});
  const double want = 2.0 / std::numbers::pi * std::log(2.0);
  double worst = 0;
  for (std::size_t i = 1; i < g.size(); ++i) worst = std::max(worst, std::abs((g[i] - g[i - 1]) / want - 1.0));
  o.require(worst <= kLogTol, "max rel dev of differences from (2/pi) ln 2: " + fmt(worst));
}

// ---- 4 ----
void hs_identity(Outcome& o) {
  auto dom = domain(2, 8);
  DisorderLaw law;
  law.kind = DisorderLawKind::Conductance;
  law.kappa = 1.0;
  law.delta = 0.3;
  const auto w = sample_disorder(DisorderModel::B, dom->box_ptr(), law, 2024);
  const GibbsModel m = make_model(dom, Potential(PotentialSpec{}), w, BoundarySpec::zero());
  const GreenTable occ(dom, m.kappa, GreenNormalization::OccupationTime);
  const auto env = DynamicEnvironment::static_rates(dom, m.kappa);
  const std::pair<Site, Site> pairs[] = {{Site{}, Site{}}, {Site{}, make_site({2, 1})}, {make_site({-3, 2}), make_site({1, -1})}};
  std::uint64_t k = 0;
  for (const auto& [x, z] : pairs) {
    const auto r = hs_walk_green(env, x, z, kWalkers, derive_key(7, 4, k++), 1);
    const double zs = std::abs(r.estimate - occ.at(x, z)) / r.se;
    o.require(zs <= kHsSigmas, "z=" + fmt(zs, 3));
  }
}

// ---- 5 ----
void langevin(Outcome& o) {
  auto dom = domain(2, 8);
  const GibbsModel m = make_model(dom, Potential(PotentialSpec{}), BoundarySpec::zero());
  const auto rep = langevin_step_refinement_check(m, {Site{}, make_site({2, 1}), make_site({-4, 3})}, kLangevinH, kLangevinT, 5);
  for (const auto& r : rep.rows) {
    const double z = std::abs(r.var_half - r.exact) / r.se_half;
    const double b = std::abs(r.bias) / r.se_half;
    o.require(z <= kLangevinSigmas && b < kBiasSigmas, "z=" + fmt(z, 3) + " bias/se=" + fmt(b, 3));
  }
}

// ---- 6 ----
void brascamp_lieb(Outcome& o) {
  auto dom = domain(2, 8);
  const GibbsModel m = make_model(dom, Potential(perturbed()), BoundarySpec::zero());
  SamplerConfig cfg;
  cfg.samples = kBlSamples;
  cfg.seed = 6;
  SampleStream s(m, cfg, initial_field(m));
  const auto xi = dom->box().index_or_throw(make_site({-2, 0})), yi = dom->box().index_or_throw(make_site({2, 0}));
  std::vector<double> series;
  while (s.next()) series.push_back(s.current()[xi] - s.current()[yi]);
  std::vector<double> v(dom->box().site_count(), 0.0);
  v[xi] = 1;
  v[yi] = -1;
  const auto r = brascamp_lieb_ratio(series, gaussian_reference_variance(m, v), m.c1());
  o.require(r.within_bound, "ratio " + fmt(r.ratio) + " <= " + fmt(r.bound));
}

// ---- 7 ----
void coupling(Outcome& o) {
  auto dom = domain(2, 8);
  const GibbsModel mq = make_model(dom, Potential(PotentialSpec{}), BoundarySpec::zero());
  const Eigen::MatrixXd a(assemble_precision(*dom, mq.kappa));
  const double l1 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues()[0];
  auto rate = [&](const GibbsModel& m) {
    HeightField x = initial_field(m), y = x;
    NoiseStream init(77);
    for (auto i : dom->free_sites()) y.values()[i] += 3.0 * init.next();
    return contraction_rate(coupled_run(m, x, y, kCouplingT, default_step(m), kCouplingR, 7)).rate;
  };
  const double rq = rate(mq);
  o.require(std::abs(rq / (2 * l1) - 1) <= kRateTol, "quadratic rate/(2 lambda1) " + fmt(rq / (2 * l1), 5));
  const GibbsModel mp = make_model(dom, Potential(perturbed()), BoundarySpec::zero());
  const double rp = rate(mp);
  o.require(rp >= kRateFloor * mp.c1() * l1, "perturbed rate " + fmt(rp) + " >= " + fmt(kRateFloor * mp.c1() * l1));
}

// ---- 8 ----
void tilt(Outcome& o) {
  const int window = 2;
  {
    const std::vector<double> u = {1.0, -0.5, 0.25};
    auto dom = domain(3, 6);
    const GibbsModel m = make_model(dom, Potential(PotentialSpec{}), BoundarySpec::tilted(u));
    const HeightField mean = GaussianModel(m).mean_field();
    double worst = 0;
    for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(window_tilt(mean, a, window) - u[a]));
    o.require(worst <= kExactTiltTol, "exact tilt err " + fmt(worst));
  }
  auto dom = domain(3, 6);
  DisorderLaw law;
  law.scale = 1.0;
  const Potential pot(perturbed());
  std::vector<double> means(kTiltEnsemble * 3);
  parallel_for(kTiltEnsemble, resolve_threads(0), [&](std::size_t k) {
    const auto xi = sample_disorder(DisorderModel::A, dom->box_ptr(), law, derive_key(8, 7, k));
    const GibbsModel m = make_model(dom, pot, xi, BoundarySpec::zero());
    SamplerConfig cfg;
    cfg.samples = kTiltSamples;
    cfg.seed = derive_key(8, 3, k);
    SampleStream s(m, cfg, initial_field(m));
    std::array<double, 3> acc{};
    while (s.next())
      for (int a = 0; a < 3; ++a) acc[a] += window_tilt(s.current(), a, window);
    for (int a = 0; a < 3; ++a) means[k * 3 + a] = acc[a] / static_cast<double>(kTiltSamples);
  });
  for (int a = 0; a < 3; ++a) {
    std::vector<double> col(kTiltEnsemble);
    for (std::size_t k = 0; k < kTiltEnsemble; ++k) col[k] = means[k * 3 + a];
    const auto jk = jackknife_mean(col);
    o.require(std::abs(jk.estimate) <= kTiltSigmas * jk.se, "axis " + std::to_string(a) + " z=" + fmt(std::abs(jk.estimate) / jk.se, 3));
  }
}

// ---- 9 ----
void covariance_a(Outcome& o) {
  const Bond b = axis_bond(Site{}, 0);
  std::vector<Bond> partners;
  std::vector<double> seps;
  for (int s = 2; s <= 12; ++s) {
    partners.push_back(shift(b, unit_vector(1, s)));
    seps.push_back(s);
  }
  const auto rep = model_a_exact_covariance(3, 24, 1.0, 1.0, b, partners, seps, true, 96.0);
  o.require(std::abs(rep.exponent - kExponentA) <= kExponentATol, "exponent " + fmt(rep.exponent));
  const std::vector<int> check = {2, 6, 12};
  const auto fourier = oracle::dipole_covariance(3, check, 128);
  double worst = 0;
  for (std::size_t i = 0; i < check.size(); ++i)
    worst = std::max(worst, std::abs(rep.values[static_cast<std::size_t>(check[i] - 2)] / fourier[i] - 1.0));
  o.require(worst <= kFourierTol, "Fourier oracle rel dev " + fmt(worst));
  const auto box = model_a_exact_covariance(3, 24, 1.0, 1.0, b, partners, seps, false);
  o.detail << "; box-only exponent " << fmt(box.exponent, 3);
}

// ---- 10 ----
void covariance_b(Outcome& o) {
  const Bond b = axis_bond(Site{}, 0);
  std::vector<Bond> partners;
  std::vector<LocalObservable> gs;
  std::vector<double> seps;
  for (int s = 2; s <= 6; ++s) {
    partners.push_back(shift(b, unit_vector(1, s)));
    gs.push_back(LocalObservable::bond(partners.back(), true));
    seps.push_back(s);
  }
  CovarianceDecayReport first;
  first.separations = seps;
  first.values = model_b_first_order_covariance(2, 12, 1.0, 0.2, b, partners);
  fit_decay(first);
  o.require(first.exponent >= kExponentBMin, "first-order exponent " + fmt(first.exponent));
  EnsembleSpec spec;
  spec.d = 2;
  spec.n = 12;
  spec.model = DisorderModel::B;
  spec.law.kind = DisorderLawKind::Conductance;
  spec.law.kappa = 1.0;
  spec.law.delta = 0.2;
  spec.ensemble = kEnsembleB;
  spec.seed = 10;
  spec.threads = resolve_threads(0);
  const auto mc = annealed_covariance_decay(spec, LocalObservable::bond(b, true), gs, seps);
  double worst = 0;
  for (std::size_t k = 0; k < seps.size(); ++k) worst = std::max(worst, std::abs(mc.values[k] - first.values[k]) / mc.se[k]);
  o.require(worst <= kOracleSigmas, "max |MC - oracle|/se " + fmt(worst, 3));
}

// ---- 11 ----
void nonexistence(Outcome& o) {
  const Bond b = axis_bond(Site{}, 0);
  const std::vector<int> sizes = {8, 16, 32};
  std::vector<double> lx, v2, v3;
  for (int n : sizes) {
    lx.push_back(std::log(static_cast<double>(n)));
    v2.push_back(model_a_gradient_mean_variance(2, n, 1.0, 1.0, b));
    v3.push_back(model_a_gradient_mean_variance(3, n, 1.0, 1.0, b));
  }
  const auto fit = fit_line(lx, v2);
  o.require(fit.slope > 0, "d=2 slope vs ln N " + fmt(fit.slope));
  double worst = 0;
  for (std::size_t i = 1; i < v3.size(); ++i) worst = std::max(worst, std::abs(v3[i] / v3[i - 1] - 1.0));
  o.require(worst < kBoundedTol, "d=3 max successive rel diff " + fmt(worst));
}

// ---- 12 ----
void pinning(Outcome& o) {
  std::vector<int> probes;
  for (int a = 2; a <= 32; ++a) probes.push_back(a);
  for (int d : {1, 2}) {
    const auto p = pinned_variance_profile(d, 64, probes);
    const double need = d == 1 ? kR2Line : kR2Log;
    o.require(p.fit.r2 >= need, "d=" + std::to_string(d) + " R2 " + fmt(p.fit.r2) + " (need " + fmt(need) + ")");
    o.require(p.ratio_min >= kRatioLo && p.ratio_max <= kRatioHi,
              "d=" + std::to_string(d) + " ratio " + fmt(p.ratio_min, 3) + ".." + fmt(p.ratio_max, 3));
  }
}

// ---- 13 ----
void convolution(Outcome& o) {
  std::vector<int> seps;
  for (int s = 1; s <= 16; ++s) seps.push_back(s);
  auto one = [&](int d, ConvolutionKind k, const char* tag) {
    const auto r = convolution_bound_check(d, k, {64, 128}, seps);
    o.require(r.relative_change.back() < kConvTol, std::string(tag) + " d=" + std::to_string(d) + " " + fmt(r.relative_change.back(), 3));
  };
  one(3, ConvolutionKind::Gradient, "gradient");
  for (int d : {1, 2, 3}) one(d, ConvolutionKind::Second, "second");
}

// ---- 14 ----
void properties(Outcome& o) {
  // plaquette / reconstruction round trip
  {
    double worst = 0;
    for (int d = 2; d <= 3; ++d) {
      auto dom = domain(d, 4);
      NoiseStream g(14 + d);
      std::vector<double> v(dom->box().site_count());
      g.fill(v);
      const HeightField phi(dom, v);
      const auto eta = gradient_of(phi);
      if (!check_plaquettes(eta).ok) worst = 1;
      const auto back = reconstruct(eta, phi.at(Site{}));
      for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(back[i] - v[i]));
    }
    o.require(worst <= 1e-12, "round trip " + fmt(worst));
  }
  // drift against energy finite differences
  {
    auto dom = domain(2, 3);
    DisorderLaw law;
    law.scale = 1.0;
    const auto xi = sample_disorder(DisorderModel::A, dom->box_ptr(), law, 1);
    const GibbsModel m = make_model(dom, Potential(perturbed()), xi, BoundarySpec::tilted({0.2, 0.1}));
    HeightField phi = initial_field(m);
    NoiseStream g(2);
    for (auto i : dom->free_sites()) phi.values()[i] = g.next();
    const auto dr = drift(phi, m);
    double worst = 0;
    for (std::size_t k = 0; k < dr.size(); ++k) {
      HeightField up = phi, dn = phi;
      up.values()[dom->free_sites()[k]] += 1e-6;
      dn.values()[dom->free_sites()[k]] -= 1e-6;
      worst = std::max(worst, std::abs(dr[k] + (energy(up, m) - energy(dn, m)) / 2e-6));
    }
    o.require(worst <= 1e-6, "drift FD " + fmt(worst));
  }
  // Green symmetry and monotonicity
  {
    auto small = domain(2, 3);
    auto big = domain(2, 5);
    CounterRng r(3);
    std::vector<double> k(small->box().edges().size());
    for (double& x : k) x = 0.5 + r.uniform();
    const GreenTable p(small, k, GreenNormalization::PrecisionInverse);
    const GreenTable gs = srw_green_exact(small), gb = srw_green_exact(big);
    double asym = 0;
    bool mono = true;
    for (auto x : small->free_sites())
      for (auto y : small->free_sites()) {
        asym = std::max(asym, std::abs(p(x, y) - p(y, x)));
        const Site sx = small->box().site(x), sy = small->box().site(y);
        mono &= gs.at(sx, sy) < gb.at(sx, sy);
      }
    o.require(asym <= 1e-12 && mono, "Green asym " + fmt(asym) + (mono ? " monotone" : " NOT monotone"));
  }
  // accumulator merge
  {
    NoiseStream g(4);
    MomentAccumulator all, a, b;
    for (int i = 0; i < 10000; ++i) {
      const double x = g.next() + 1e3;
      all.add(x);
      (i % 3 ? a : b).add(x);
    }
    a.merge(b);
    const double dm = std::abs(a.mean() - all.mean()) / std::abs(all.mean());
    const double dv = std::abs(a.m2() - all.m2()) / all.m2();
    o.require(a.count() == all.count() && dm <= 1e-12 && dv <= 1e-10, "merge rel " + fmt(std::max(dm, dv)));
  }
  // determinism across thread counts
  {
    EnsembleSpec spec;
    spec.d = 2;
    spec.n = 4;
    spec.law.scale = 1.0;
    spec.potential = Potential(perturbed());
    spec.sampler.samples = 64;
    spec.ensemble = 8;
    const auto f = LocalObservable::bond(axis_bond(Site{}, 0));
    const std::vector<LocalObservable> g = {LocalObservable::bond(axis_bond(unit_vector(1, 2), 0))};
    spec.threads = 1;
    const auto x = annealed_covariance_decay(spec, f, g, {2});
    spec.threads = 4;
    const auto y = annealed_covariance_decay(spec, f, g, {2});
    auto dom = domain(2, 3);
    const auto env = DynamicEnvironment::static_rates(dom, std::vector<double>(dom->box().edges().size(), 1.0));
    const auto w1 = hs_walk_green(env, Site{}, Site{}, 4000, 9, 1);
    const auto w3 = hs_walk_green(env, Site{}, Site{}, 4000, 9, 3);
    o.require(x.values == y.values && x.se == y.se && w1.estimate == w3.estimate, "thread-count invariance");
  }
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  void (*run)(Outcome&);
};

}  // namespace

int main(int argc, char** argv) {
  // optional criterion numbers select a subset
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const Criterion all[] = {
      {1, "Green closed form (1D)", 1, chain_closed_form},
      {2, "Green asymptotics d=3", 120, green_asymptotics},
      {3, "d=2 logarithmic growth", 60, log_growth},
      {4, "walk occupation identity", 120, hs_identity},
      {5, "Langevin correctness", 300, langevin},
      {6, "Brascamp-Lieb bound", 300, brascamp_lieb},
      {7, "coupling contraction", 300, coupling},
      {8, "tilt", 1800, tilt},
      {9, "covariance decay model A", 600, covariance_a},
      {10, "covariance decay model B", 3600, covariance_b},
      {11, "non-existence signal d=2", 300, nonexistence},
      {12, "pinning localization", 120, pinning},
      {13, "convolution bounds", 120, convolution},
      {14, "property suites", 300, properties},
  };
  int failed = 0, ran = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs <= c.limit_seconds, "runtime " + fmt(secs, 3) + " s (limit " + fmt(c.limit_seconds, 4) + " s)");
    if (!o.pass) ++failed;
    std::printf("[%s] C%d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed ? 1 : 0;
}
