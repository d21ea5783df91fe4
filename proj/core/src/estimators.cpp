#include "gglab/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numeric>

#include "gglab/error.hpp"
#include "gglab/linalg.hpp"

namespace gglab {

namespace {

std::vector<std::uint32_t> window_sites(const LatticeBox& box, int n) {
  if (n < 0 || n > box.half_side()) throw DomainError("window radius must lie in [0, N]");
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < box.interior_count(); ++i)
    if (sup_norm(box.site(i) - box.offset()) <= n) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

// variance from per-batch means of x and x^2
JackknifeResult variance_from_batches(const std::vector<double>& m1, const std::vector<double>& m2, double n_total) {
  const double corr = n_total > 1 ? n_total / (n_total - 1) : 1.0;
  return jackknife(m1.size(), [&](std::span<const std::size_t> keep) {
    double a = 0.0, b = 0.0;
    for (std::size_t k : keep) {
      a += m1[k];
      b += m2[k];
    }
    const double n = static_cast<double>(keep.size());
    a /= n;
    b /= n;
    return corr * (b - a * a);
  });
}

}  // namespace

double window_tilt(const HeightField& phi, int axis, int n) {
  const LatticeBox& box = phi.box();
  if (axis < 0 || axis >= box.dim()) throw DomainError("tilt axis out of range");
  const auto sites = window_sites(box, n);
  const Site e = unit_vector(axis);
  double s = 0.0;
  for (std::uint32_t i : sites) s += phi.at(box.site(i) + e) - phi[i];
  return s / static_cast<double>(sites.size());
}

TiltReport tilt_estimate(SampleStream& stream, int axis, int n, std::size_t batches) {
  std::vector<double> series;
  while (stream.next()) series.push_back(window_tilt(stream.current(), axis, n));
  const BatchMeansResult bm = batch_means(series, batches);
  TiltReport rep;
  rep.forward = bm.mean;
  rep.reversed = -bm.mean;
  rep.se = bm.se;
  rep.samples = series.size();
  rep.orientation = "forward = phi(x+e_a) - phi(x); reversed = phi(x) - phi(x+e_a)";
  rep.proxy = "finite-volume window mean of the forward gradient under a tilted boundary";
  return rep;
}

JackknifeResult batch_variance(std::span<const double> series, std::size_t batches) {
  if (batches < 2 || series.size() < batches) throw ConfigError("batch variance needs at least one sample per batch");
  const std::size_t bs = series.size() / batches;
  std::vector<double> m1(batches, 0.0), m2(batches, 0.0);
  for (std::size_t k = 0; k < batches; ++k) {
    for (std::size_t j = 0; j < bs; ++j) {
      const double x = series[k * bs + j];
      m1[k] += x;
      m2[k] += x * x;
    }
    m1[k] /= static_cast<double>(bs);
    m2[k] /= static_cast<double>(bs);
  }
  return variance_from_batches(m1, m2, static_cast<double>(bs * batches));
}

double gaussian_reference_variance(const GibbsModel& m, std::span<const double> v) {
  const Domain& dom = *m.domain;
  if (v.size() != dom.box().site_count()) throw DomainError("functional must be indexed by box site");
  const std::vector<double> ones(dom.box().edges().size(), 1.0);
  SpdSolver solver(assemble_precision(dom, ones));
  Vector w = Vector::Zero(static_cast<Eigen::Index>(dom.free_count()));
  for (std::size_t k = 0; k < dom.free_count(); ++k) w[static_cast<Eigen::Index>(k)] = v[dom.free_sites()[k]];
  if (w.isZero(0.0)) throw DomainError("functional vanishes on the free sites");
  return w.dot(solver.solve(w));
}

BrascampLiebReport brascamp_lieb_ratio(std::span<const double> series, double gaussian_variance, double c1,
                                       std::size_t batches) {
  if (!(gaussian_variance > 0) || !(c1 > 0)) throw DomainError("reference variance and C1 must be positive");
  const JackknifeResult v = batch_variance(series, batches);
  BrascampLiebReport rep;
  rep.variance = v.estimate;
  rep.variance_se = v.se;
  rep.gaussian_variance = gaussian_variance;
  rep.c1 = c1;
  const double ref = gaussian_variance / c1;
  rep.ratio = v.estimate / ref;
  rep.ratio_se = v.se / ref;
  rep.bound = 1.0 + 3.0 * (rep.ratio > 0 ? rep.ratio_se / rep.ratio : 0.0);
  rep.within_bound = rep.ratio <= rep.bound;
  return rep;
}

LangevinCheckReport langevin_step_refinement_check(const GibbsModel& m, const std::vector<Site>& probes, double h,
                                                   double total_time, std::uint64_t seed, std::size_t batches) {
  if (!m.is_quadratic()) throw DomainError("step refinement check needs the exact Gaussian reference");
  if (!(h > 0) || !(total_time > 0)) throw ConfigError("step refinement check needs h > 0 and T > 0");
  const LatticeBox& box = m.box();
  std::vector<std::uint32_t> idx;
  for (const Site& p : probes) {
    const auto i = box.index_or_throw(p);
    if (m.domain->is_frozen(i)) throw DomainError("probe " + to_string(p, box.dim()) + " is frozen");
    idx.push_back(i);
  }

  const GaussianModel g(m);
  NoiseStream init(derive_key(seed, static_cast<std::uint64_t>(StreamTag::Initial)));
  HeightField coarse = g.sample(init);
  HeightField fine = coarse;
  LangevinIntegrator ic(m, h), ifn(m, 0.5 * h);
  NoiseStream noise(derive_key(seed, static_cast<std::uint64_t>(StreamTag::Chain)));
  std::vector<double> g1(ic.free_count()), g2(ic.free_count()), gc(ic.free_count());

  const auto burn = static_cast<std::size_t>(std::ceil(default_burn_in(m) / h));
  const auto steps = static_cast<std::size_t>(std::llround(total_time / h));
  if (steps < batches) throw ConfigError("run too short for the requested batches");
  const std::size_t np = idx.size();
  std::vector<BatchAccumulator> acc;
  for (std::size_t k = 0; k < 4 * np; ++k) acc.emplace_back(steps, batches);

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t n = 0; n < burn + steps; ++n) {
    noise.fill(g1);
    noise.fill(g2);
    for (std::size_t k = 0; k < gc.size(); ++k) gc[k] = (g1[k] + g2[k]) * inv_sqrt2;
    ifn.step_with_noise(fine, g1);
    ifn.step_with_noise(fine, g2);
    ic.step_with_noise(coarse, gc);
    if (n < burn) continue;
    for (std::size_t p = 0; p < np; ++p) {
      const double a = coarse[idx[p]], b = fine[idx[p]];
      acc[4 * p].add(a);
      acc[4 * p + 1].add(a * a);
      acc[4 * p + 2].add(b);
      acc[4 * p + 3].add(b * b);
    }
  }

  LangevinCheckReport rep;
  rep.h = h;
  rep.total_time = static_cast<double>(steps) * h;
  const double ntot = static_cast<double>(steps - steps % batches);
  for (std::size_t p = 0; p < np; ++p) {
    LangevinCheckRow row;
    row.probe = probes[p];
    row.exact = g.covariance(idx[p], idx[p]);
    const auto vh = variance_from_batches(acc[4 * p].batch_values(), acc[4 * p + 1].batch_values(), ntot);
    const auto vf = variance_from_batches(acc[4 * p + 2].batch_values(), acc[4 * p + 3].batch_values(), ntot);
    row.var_h = vh.estimate;
    row.se_h = vh.se;
    row.var_half = vf.estimate;
    row.se_half = vf.se;
    row.bias = vh.estimate - vf.estimate;
    rep.rows.push_back(row);
  }
  return rep;
}

PinnedProfile pinned_variance_profile(int d, int N, const std::vector<int>& probes) {
  if (probes.empty()) throw ConfigError("pinned profile needs probes");
  auto box = std::make_shared<const LatticeBox>(d, N);
  const std::vector<double> ones(box->edges().size(), 1.0);
  auto pinned = std::make_shared<const Domain>(box, std::vector<Site>{Site{}});
  const GreenTable table(pinned, ones, GreenNormalization::PrecisionInverse);

  PinnedProfile prof;
  prof.d = d;
  prof.n = N;
  prof.regressor = d == 1 ? "|a|" : "log|a|";
  std::vector<double> xs, ys;
  for (int a : probes) {
    if (a < 1 || a > N) throw DomainError("probe distance must lie in [1, N]");
    Site x = unit_vector(0, a);
    const auto xi = box->index_or_throw(x);
    PinnedProfileRow row;
    row.a = a;
    row.var_pinned = table(xi, xi);
    const Domain region = Domain::where(box, [x](const Site& b) { return sup_norm(x - b) <= sup_norm(b); });
    SpdSolver solver(assemble_precision(region, ones));
    Vector e = Vector::Zero(static_cast<Eigen::Index>(region.free_count()));
    const auto fi = region.free_index(xi);
    e[fi] = 1.0;
    row.var_region = solver.solve(e)[fi];
    row.ratio = row.var_pinned / row.var_region;
    prof.rows.push_back(row);
    xs.push_back(d == 1 ? a : std::log(static_cast<double>(a)));
    ys.push_back(row.var_pinned);
  }
  if (xs.size() >= 2) prof.fit = fit_line(xs, ys);
  prof.ratio_min = prof.rows.front().ratio;
  prof.ratio_max = prof.rows.front().ratio;
  for (const auto& r : prof.rows) {
    prof.ratio_min = std::min(prof.ratio_min, r.ratio);
    prof.ratio_max = std::max(prof.ratio_max, r.ratio);
  }
  return prof;
}

double LocalObservable::operator()(const HeightField& phi) const {
  double s = 0.0;
  for (std::size_t k = 0; k < bonds.size(); ++k) s += weights[k] * (phi.at(bonds[k].head) - phi.at(bonds[k].tail));
  return square ? s * s : s;
}

Bond axis_bond(const Site& x, int axis) { return {x, x + unit_vector(axis)}; }

LocalObservable window_gradient(const LatticeBox& box, int axis, int n) {
  const auto sites = window_sites(box, n);
  LocalObservable f;
  const double w = 1.0 / static_cast<double>(sites.size());
  for (std::uint32_t i : sites) {
    f.bonds.push_back(axis_bond(box.site(i), axis));
    f.weights.push_back(w);
  }
  return f;
}

QuenchedEstimate quenched_exact(const GaussianModel& g, const LocalObservable& f) {
  const GibbsModel& m = g.model();
  const Domain& dom = *m.domain;
  const LatticeBox& box = dom.box();
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dom.free_count()));
  double c = 0.0;
  auto add = [&](const Site& x, double w) {
    const auto i = box.index_or_throw(x);
    const auto fi = dom.free_index(i);
    if (fi >= 0)
      v[fi] += w;
    else
      c += w * m.psi[i];
  };
  for (std::size_t k = 0; k < f.bonds.size(); ++k) {
    add(f.bonds[k].head, f.weights[k]);
    add(f.bonds[k].tail, -f.weights[k]);
  }
  const double mu = v.dot(g.mean()) + c;
  const double s2 = v.isZero(0.0) ? 0.0 : g.variance_of(v);
  QuenchedEstimate q;
  if (f.square) {
    q.mean = mu * mu + s2;
    q.var = 2.0 * s2 * s2 + 4.0 * mu * mu * s2;
  } else {
    q.mean = mu;
    q.var = s2;
  }
  return q;
}

QuenchedAnnealedReport quenched_annealed_decompose(const std::vector<QuenchedEstimate>& per, double target) {
  if (per.size() < 8) throw ConfigError("quenched/annealed split needs an ensemble of at least 8 disorders");
  const std::size_t K = per.size();
  auto terms = [&](std::span<const std::size_t> keep) {
    double mv = 0.0, mm = 0.0, tot = 0.0;
    for (std::size_t k : keep) {
      mv += per[k].var;
      mm += per[k].mean;
      tot += per[k].var + (per[k].mean - target) * (per[k].mean - target);
    }
    const double n = static_cast<double>(keep.size());
    mv /= n;
    mm /= n;
    tot /= n;
    double vm = 0.0;
    for (std::size_t k : keep) vm += (per[k].mean - mm) * (per[k].mean - mm);
    vm /= n;
    return std::array<double, 4>{mv, vm, (mm - target) * (mm - target), tot};
  };
  QuenchedAnnealedReport rep;
  rep.per_disorder = per;
  rep.target = target;
  std::array<JackknifeResult, 4> jk;
  for (std::size_t t = 0; t < 4; ++t) jk[t] = jackknife(K, [&](std::span<const std::size_t> keep) { return terms(keep)[t]; });
  rep.mean_quenched_var = jk[0].estimate;
  rep.var_quenched_mean = jk[1].estimate;
  rep.bias_sq = jk[2].estimate;
  rep.total = jk[3].estimate;
  rep.se_mean_quenched_var = jk[0].se;
  rep.se_var_quenched_mean = jk[1].se;
  rep.se_bias_sq = jk[2].se;
  rep.se_total = jk[3].se;
  return rep;
}

ConvolutionReport convolution_bound_check(int d, ConvolutionKind kind, const std::vector<double>& radii,
                                          const std::vector<int>& separations) {
  if (d < 1 || d > 3) throw DomainError("convolution sums are tabulated for d = 1, 2, 3");
  if (kind == ConvolutionKind::Gradient && d < 3) throw DomainError("gradient convolution diverges for d < 3");
  if (radii.empty() || separations.empty()) throw ConfigError("convolution check needs radii and separations");
  std::vector<double> rs = radii;
  std::sort(rs.begin(), rs.end());
  const int p = kind == ConvolutionKind::Gradient ? d - 1 : d;
  const int q = kind == ConvolutionKind::Gradient ? d - 2 : d;
  const int R = static_cast<int>(std::floor(rs.back()));
  const std::size_t ns = separations.size(), nr = rs.size();

  auto inv_pow = [p](double r) {
    double v = 1.0;
    for (int k = 0; k < p; ++k) v *= r;
    return 1.0 / v;
  };
  // per-radius bucket sums, prefix-summed afterwards
  std::vector<double> sums(nr * ns, 0.0), diag(nr, 0.0);
  std::array<int, 3> y{};
  const int lo2 = d > 1 ? -R : 0, lo3 = d > 2 ? -R : 0;
  const int hi2 = d > 1 ? R : 0, hi3 = d > 2 ? R : 0;
  for (y[2] = lo3; y[2] <= hi3; ++y[2]) {
    for (y[1] = lo2; y[1] <= hi2; ++y[1]) {
      for (y[0] = -R; y[0] <= R; ++y[0]) {
        const double r2 = static_cast<double>(y[0]) * y[0] + static_cast<double>(y[1]) * y[1] + static_cast<double>(y[2]) * y[2];
        const double r = std::sqrt(r2);
        if (r > rs.back()) continue;
        const std::size_t bucket = static_cast<std::size_t>(std::lower_bound(rs.begin(), rs.end(), r) - rs.begin());
        const double base = inv_pow(std::max(r, 1.0));
        diag[bucket] += base * base;
        const double rest = r2 - static_cast<double>(y[0]) * y[0];
        for (std::size_t s = 0; s < ns; ++s) {
          const double dx = static_cast<double>(y[0] - separations[s]);
          const double rz = std::sqrt(rest + dx * dx);
          sums[bucket * ns + s] += base * inv_pow(std::max(rz, 1.0));
        }
      }
    }
  }
  ConvolutionReport rep;
  rep.d = d;
  rep.kind = kind;
  rep.separations = separations;
  std::vector<double> run(ns, 0.0);
  double run_diag = 0.0;
  for (std::size_t b = 0; b < nr; ++b) {
    ConvolutionRow row;
    row.radius = rs[b];
    run_diag += diag[b];
    row.diagonal = run_diag;
    for (std::size_t s = 0; s < ns; ++s) {
      run[s] += sums[b * ns + s];
      const double sep = std::max(static_cast<double>(std::abs(separations[s])), 1.0);
      const double v = run[s] * std::pow(sep, q);
      row.normalized.push_back(v);
      row.sup = std::max(row.sup, v);
    }
    rep.rows.push_back(row);
  }
  for (std::size_t b = 1; b < nr; ++b) rep.relative_change.push_back(std::abs(rep.rows[b].sup / rep.rows[b - 1].sup - 1.0));
  return rep;
}

}  // namespace gglab
