#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "gglab/error.hpp"
#include "gglab/estimators.hpp"
#include "gglab/linalg.hpp"
#include "gglab/parallel.hpp"

namespace gglab {

namespace {

// +1 at the head, -1 at the tail, free sites only
Vector dipole(const Domain& dom, const Bond& b) {
  const LatticeBox& box = dom.box();
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dom.free_count()));
  const auto h = dom.free_index(box.index_or_throw(b.head));
  const auto t = dom.free_index(box.index_or_throw(b.tail));
  if (h >= 0) v[h] += 1.0;
  if (t >= 0) v[t] -= 1.0;
  return v;
}

// on-axis direction of a bond: (axis, sign)
std::pair<int, int> bond_direction(const Bond& b, int d) {
  const Site dv = b.head - b.tail;
  for (int a = 0; a < d; ++a)
    if (dv[a] != 0) return {a, dv[a]};
  throw DomainError("degenerate bond");
}

// grad over every box edge of a free-order vector, 0 on frozen sites
std::vector<double> edge_gradient(const Domain& dom, const Vector& w) {
  const auto& edges = dom.box().edges();
  std::vector<double> out(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto a = dom.free_index(edges[e].hi), b = dom.free_index(edges[e].lo);
    out[e] = (a >= 0 ? w[a] : 0.0) - (b >= 0 ? w[b] : 0.0);
  }
  return out;
}

double unit_ball_volume(int d) { return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0); }

GibbsModel ensemble_member(const EnsembleSpec& spec, std::shared_ptr<const Domain> dom, std::size_t k) {
  const auto seed = derive_key(spec.seed, static_cast<std::uint64_t>(StreamTag::Ensemble), k);
  const DisorderSample ds = sample_disorder(spec.model, dom->box_ptr(), spec.law, seed);
  const BoundarySpec bc = spec.tilt.empty() ? BoundarySpec::zero() : BoundarySpec::tilted(spec.tilt);
  return make_model(std::move(dom), spec.potential, ds, bc);
}

// quenched mean and variance of each observable under one model
std::vector<QuenchedEstimate> quenched_all(const GibbsModel& m, const std::vector<const LocalObservable*>& obs,
                                           const SamplerConfig& sampler, std::uint64_t chain_seed) {
  std::vector<QuenchedEstimate> out;
  if (m.is_quadratic()) {
    const GaussianModel g(m);
    for (const auto* f : obs) out.push_back(quenched_exact(g, *f));
    return out;
  }
  SamplerConfig cfg = sampler;
  cfg.seed = chain_seed;
  SampleStream s = equilibrate_and_sample(m, cfg);
  std::vector<std::vector<double>> series(obs.size());
  while (s.next())
    for (std::size_t j = 0; j < obs.size(); ++j) series[j].push_back((*obs[j])(s.current()));
  const std::size_t nb = std::min<std::size_t>(kDefaultBatches, std::max<std::size_t>(2, series.front().size()));
  for (const auto& x : series) {
    const BatchMeansResult bm = batch_means(x, nb);
    const JackknifeResult v = batch_variance(x, nb);
    out.push_back({bm.mean, bm.se, v.estimate, v.se});
  }
  return out;
}

}  // namespace

void fit_decay(CovarianceDecayReport& rep) {
  auto fit = [&](std::size_t first, double* r2) {
    std::vector<double> x, y;
    for (std::size_t k = first; k < rep.values.size(); ++k) {
      if (rep.values[k] == 0.0 || rep.separations[k] <= 0) continue;
      x.push_back(std::log(rep.separations[k]));
      y.push_back(std::log(std::abs(rep.values[k])));
    }
    if (x.size() < 2) return std::nan("");
    const LinearFit lf = fit_line(x, y);
    if (r2) *r2 = lf.r2;
    return -lf.slope;
  };
  rep.exponent = fit(0, &rep.r2);
  rep.exponent_drop_first = fit(1, nullptr);
}

CovarianceDecayReport model_a_exact_covariance(int d, int N, double kappa, double sigma2, const Bond& b,
                                               const std::vector<Bond>& partners, const std::vector<double>& separations,
                                               bool whole_space, double outer_radius) {
  if (partners.size() != separations.size()) throw ConfigError("one partner bond per separation");
  if (!(kappa > 0) || sigma2 < 0) throw DomainError("need kappa > 0 and sigma^2 >= 0");
  auto box = std::make_shared<const LatticeBox>(d, N);
  auto dom = std::make_shared<const Domain>(box);
  CovarianceDecayReport rep;
  rep.separations = separations;
  rep.se.assign(separations.size(), 0.0);

  if (!whole_space) {
    const std::vector<double> kap(box->edges().size(), kappa);
    SpdSolver solver(assemble_precision(*dom, kap));
    const Vector wb = solver.solve(dipole(*dom, b));
    for (const Bond& p : partners) rep.values.push_back(sigma2 * wb.dot(solver.solve(dipole(*dom, p))));
    rep.method = "exact finite box";
    fit_decay(rep);
    return rep;
  }

  if (d < 3) throw DomainError("whole-space covariance needs d >= 3");
  const std::vector<double> ones(box->edges().size(), 1.0);
  const GreenTable table(dom, ones, GreenNormalization::PrecisionInverse);
  auto column = [&](const Bond& x) { return Vector(whole_space_column(table, x.head) - whole_space_column(table, x.tail)); };
  const double two_d = 2.0 * d;
  auto far = [&](const Site& z, const Bond& x) {
    return (whole_space_asymptote(d, euclidean_norm(z - x.head)) - whole_space_asymptote(d, euclidean_norm(z - x.tail))) / two_d;
  };
  const Vector wb = column(b);
  const auto [ab, sb] = bond_direction(b, d);
  const double amp = whole_space_asymptote(d, 1.0) / two_d;
  const double M = outer_radius;
  const int R = static_cast<int>(std::floor(M));
  // lattice sites outside the interior, up to |z| <= M, all partners in one pass
  std::vector<double> outside(partners.size(), 0.0);
  Site z{};
  const int hi4 = d > 3 ? R : 0;
  for (z[3] = -hi4; z[3] <= hi4; ++z[3])
    for (z[2] = -R; z[2] <= R; ++z[2])
      for (z[1] = -R; z[1] <= R; ++z[1])
        for (z[0] = -R; z[0] <= R; ++z[0]) {
          if (box->contains_interior(z) || euclidean_norm(z) > M) continue;
          const double fb = far(z, b);
          for (std::size_t k = 0; k < partners.size(); ++k) outside[k] += fb * far(z, partners[k]);
        }
  for (std::size_t k = 0; k < partners.size(); ++k) {
    const Bond& p = partners[k];
    const double inside = wb.dot(column(p));
    const auto [ap, sp] = bond_direction(p, d);
    const double tail = ab == ap ? amp * amp * (d - 2) * unit_ball_volume(d) * std::pow(M, 2.0 - d) * sb * sp : 0.0;
    rep.values.push_back(sigma2 * (inside + outside[k] + tail) / (kappa * kappa));
  }
  rep.method = "whole lattice: box completion + outer sum + dipole tail";
  fit_decay(rep);
  return rep;
}

double model_a_gradient_mean_variance(int d, int N, double kappa, double sigma2, const Bond& b) {
  auto box = std::make_shared<const LatticeBox>(d, N);
  const Domain dom(box);
  const std::vector<double> kap(box->edges().size(), kappa);
  SpdSolver solver(assemble_precision(dom, kap));
  const Vector w = solver.solve(dipole(dom, b));
  return sigma2 * w.squaredNorm();
}

std::vector<double> model_b_first_order_covariance(int d, int N, double kappa, double delta, const Bond& b,
                                                   const std::vector<Bond>& partners) {
  auto box = std::make_shared<const LatticeBox>(d, N);
  const Domain dom(box);
  const std::vector<double> kap(box->edges().size(), kappa);
  SpdSolver solver(assemble_precision(dom, kap));
  const auto gb = edge_gradient(dom, solver.solve(dipole(dom, b)));
  const double var = kappa * kappa * delta * delta / 3.0;
  std::vector<double> out;
  for (const Bond& p : partners) {
    const auto gp = edge_gradient(dom, solver.solve(dipole(dom, p)));
    double s = 0.0;
    for (std::size_t e = 0; e < gb.size(); ++e) s += gb[e] * gb[e] * gp[e] * gp[e];
    out.push_back(var * s);
  }
  return out;
}

std::vector<QuenchedEstimate> quenched_ensemble(const EnsembleSpec& spec, const LocalObservable& x) {
  auto box = std::make_shared<const LatticeBox>(spec.d, spec.n);
  auto dom = std::make_shared<const Domain>(box);
  std::vector<QuenchedEstimate> out(spec.ensemble);
  parallel_for(spec.ensemble, spec.threads, [&](std::size_t k) {
    const GibbsModel m = ensemble_member(spec, dom, k);
    out[k] = quenched_all(m, {&x}, spec.sampler, derive_key(spec.sampler.seed, static_cast<std::uint64_t>(StreamTag::Chain), k))[0];
  });
  return out;
}

CovarianceDecayReport annealed_covariance_decay(const EnsembleSpec& spec, const LocalObservable& f,
                                                const std::vector<LocalObservable>& g,
                                                const std::vector<double>& separations) {
  if (g.size() != separations.size()) throw ConfigError("one partner observable per separation");
  if (spec.ensemble < 8) throw ConfigError("annealed covariance needs an ensemble of at least 8 disorders");
  auto box = std::make_shared<const LatticeBox>(spec.d, spec.n);
  auto dom = std::make_shared<const Domain>(box);
  std::vector<const LocalObservable*> obs{&f};
  for (const auto& x : g) obs.push_back(&x);

  const std::size_t K = spec.ensemble, J = obs.size();
  std::vector<double> means(K * J);
  std::vector<char> quad(K, 1);
  parallel_for(K, spec.threads, [&](std::size_t k) {
    const GibbsModel m = ensemble_member(spec, dom, k);
    quad[k] = m.is_quadratic();
    const auto q = quenched_all(m, obs, spec.sampler, derive_key(spec.sampler.seed, static_cast<std::uint64_t>(StreamTag::Chain), k));
    for (std::size_t j = 0; j < J; ++j) means[k * J + j] = q[j].mean;
  });

  CovarianceDecayReport rep;
  rep.separations = separations;
  for (std::size_t s = 1; s < J; ++s) {
    const auto jk = jackknife(K, [&](std::span<const std::size_t> keep) {
      double mf = 0.0, mg = 0.0;
      for (std::size_t k : keep) {
        mf += means[k * J];
        mg += means[k * J + s];
      }
      const double n = static_cast<double>(keep.size());
      mf /= n;
      mg /= n;
      double c = 0.0;
      for (std::size_t k : keep) c += (means[k * J] - mf) * (means[k * J + s] - mg);
      return c / (n - 1.0);
    });
    rep.values.push_back(jk.estimate);
    rep.se.push_back(jk.se);
  }
  const bool exact = std::all_of(quad.begin(), quad.end(), [](char c) { return c != 0; });
  rep.method = exact ? "ensemble of exact quenched expectations" : "ensemble of Langevin quenched expectations";
  fit_decay(rep);
  return rep;
}

}  // namespace gglab
