#include "gglab/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gglab/parallel.hpp"
#include "gglab/rng.hpp"
#include "gglab/stats.hpp"

namespace gglab {

GradientField::GradientField(std::shared_ptr<const LatticeBox> box, std::vector<double> edge_values)
    : box_(std::move(box)), values_(std::move(edge_values)) {
  if (values_.size() != box_->edges().size()) throw DomainError("gradient field size does not match the box edges");
}

double GradientField::operator()(const Bond& b) const {
  auto e = box_->edge_between(b.tail, b.head);
  if (!e) throw DomainError("bond " + to_string(b.tail, box_->dim()) + "->" + to_string(b.head, box_->dim()) +
                            " is not a bond of the box");
  return e->second * values_[e->first];
}

GradientField GradientField::shifted(const Site& v) const {
  auto target = std::make_shared<const LatticeBox>(box_->shifted(v));
  const auto map = shift_index_map(*box_, *target, v);
  std::vector<double> vals(target->edges().size());
  for (std::size_t e = 0; e < vals.size(); ++e) {
    const Edge& ed = target->edges()[e];
    vals[e] = values_[box_->up_edge(map[ed.lo], ed.axis)];
  }
  return GradientField(target, std::move(vals));
}

GradientField gradient_of(const HeightField& phi) {
  const LatticeBox& box = phi.box();
  std::vector<double> vals(box.edges().size());
  for (std::size_t e = 0; e < vals.size(); ++e) vals[e] = phi[box.edges()[e].hi] - phi[box.edges()[e].lo];
  return GradientField(phi.domain().box_ptr(), std::move(vals));
}

GradientField tilt_field(std::shared_ptr<const LatticeBox> box, std::span<const double> u) {
  std::vector<double> vals(box->edges().size());
  for (std::size_t e = 0; e < vals.size(); ++e) vals[e] = u[static_cast<std::size_t>(box->edges()[e].axis)];
  return GradientField(std::move(box), std::move(vals));
}

PlaquetteReport check_plaquettes(const GradientField& eta, double rel_tol) {
  PlaquetteReport r;
  double scale = 1.0;
  for (double v : eta.edge_values()) scale = std::max(scale, std::abs(v));
  r.tolerance = rel_tol * scale;
  const auto plaq = enumerate_plaquettes(eta.box());
  for (std::size_t p = 0; p < plaq.size(); ++p) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += plaq[p].sign[static_cast<std::size_t>(k)] * eta.edge(plaq[p].edge[static_cast<std::size_t>(k)]);
    if (std::abs(s) > r.worst) {
      r.worst = std::abs(s);
      r.worst_index = p;
    }
  }
  r.ok = r.worst <= r.tolerance;
  return r;
}

std::vector<double> reconstruct_values(const GradientField& eta, double phi0, std::vector<int> axis_order) {
  const LatticeBox& box = eta.box();
  const int d = box.dim();
  if (axis_order.empty()) {
    axis_order.resize(static_cast<std::size_t>(d));
    std::iota(axis_order.begin(), axis_order.end(), 0);
  }
  {
    auto sorted = axis_order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < d; ++i)
      if (sorted.size() != static_cast<std::size_t>(d) || sorted[static_cast<std::size_t>(i)] != i)
        throw DomainError("axis order must be a permutation of the axes");
  }
  const auto rep = check_plaquettes(eta);
  if (!rep.ok) {
    const auto plaq = enumerate_plaquettes(box);
    throw PlaquetteError("plaquette condition violated at corner " + to_string(box.site(plaq[rep.worst_index].corner), d) +
                             " (residual " + std::to_string(rep.worst) + ")",
                         rep.worst_index, rep.worst);
  }

  const Site& c = box.offset();
  const int n = box.half_side();
  std::vector<double> out(box.site_count());
  std::vector<int> order(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < box.site_count(); ++i) {
    const Site& x = box.site(i);
    int outside = -1;
    for (int a = 0; a < d; ++a)
      if (std::abs(x[a] - c[a]) > n) outside = a;
    std::size_t k = 0;
    for (int a : axis_order)
      if (a != outside) order[k++] = a;
    if (outside >= 0) order[k++] = outside;

    Site cur = c;
    std::uint32_t ci = box.index_or_throw(cur);
    double acc = phi0;
    for (int a : order) {
      const int dir = x[a] > cur[a] ? 1 : -1;
      while (cur[a] != x[a]) {
        if (dir > 0) {
          const std::uint32_t e = box.up_edge(ci, a);
          acc += eta.edge(e);
          ci = box.edges()[e].hi;
        } else {
          Site prev = cur;
          prev[a] -= 1;
          const std::uint32_t pi = box.index_or_throw(prev);
          acc -= eta.edge(box.up_edge(pi, a));
          ci = pi;
        }
        cur[a] += dir;
      }
    }
    out[i] = acc;
  }
  return out;
}

HeightField reconstruct(const GradientField& eta, double phi0, std::vector<int> axis_order) {
  auto dom = std::make_shared<const Domain>(eta.box_ptr());
  return HeightField(dom, reconstruct_values(eta, phi0, std::move(axis_order)));
}

namespace {

double site_weight(const Site& x, double r) { return std::exp(-2.0 * r * sup_norm(x)); }

}  // namespace

double weighted_distance(const GradientField& a, const GradientField& b, double r) {
  if (!(a.box() == b.box())) throw DomainError("weighted distance between fields on different boxes");
  const LatticeBox& box = a.box();
  double s = 0.0;
  for (std::size_t e = 0; e < box.edges().size(); ++e) {
    const double diff = a.edge(e) - b.edge(e);
    if (diff == 0.0) continue;
    const Edge& ed = box.edges()[e];
    s += (site_weight(box.site(ed.lo), r) + site_weight(box.site(ed.hi), r)) * diff * diff;
  }
  return s;
}

double weighted_norm_sq(const GradientField& a, double r) {
  const GradientField zero(a.box_ptr(), std::vector<double>(a.edge_values().size(), 0.0));
  return weighted_distance(a, zero, r);
}

double weighted_distance(const HeightField& a, const HeightField& b, double r) {
  if (!(a.box() == b.box())) throw DomainError("weighted distance between fields on different boxes");
  const LatticeBox& box = a.box();
  double s = 0.0;
  for (std::size_t e = 0; e < box.edges().size(); ++e) {
    const Edge& ed = box.edges()[e];
    const double diff = (a[ed.hi] - a[ed.lo]) - (b[ed.hi] - b[ed.lo]);
    if (diff == 0.0) continue;
    s += (site_weight(box.site(ed.lo), r) + site_weight(box.site(ed.hi), r)) * diff * diff;
  }
  return s;
}

BondObservable BondObservable::single(const Bond& b) { return linear({b}, {1.0}); }

BondObservable BondObservable::linear(std::vector<Bond> bonds, std::vector<double> w) {
  if (bonds.size() != w.size()) throw DomainError("linear observable needs one weight per bond");
  BondObservable o;
  o.support = std::move(bonds);
  o.linear_weights = w;
  o.f = [w](std::span<const double> eta) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * eta[i];
    return s;
  };
  return o;
}

double BondObservable::operator()(const HeightField& phi) const {
  std::vector<double> eta(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) eta[i] = phi.at(support[i].head) - phi.at(support[i].tail);
  return f(eta);
}

namespace {

struct ShiftEstimate {
  double value = 0.0;
  double se = 0.0;
};

ShiftEstimate estimate_on(const BondObservable& F, const LatticeBox& box, const SpatialAverageConfig& cfg,
                          const Site& shift) {
  auto b = std::make_shared<const LatticeBox>(box);
  for (const Bond& bond : F.support)
    if (!b->edge_between(bond.tail, bond.head)) throw DomainError("observable support leaves the shifted box");
  auto dom = std::make_shared<const Domain>(b);
  const auto dis = sample_disorder(cfg.model, b, cfg.law, cfg.disorder_seed);
  const BoundarySpec bc = cfg.tilt.empty() ? BoundarySpec::zero() : BoundarySpec::tilted(cfg.tilt);
  const GibbsModel m = make_model(dom, cfg.potential, dis, bc);

  if (cfg.mode == AverageMode::ExactMean) {
    if (F.linear_weights.empty()) throw ConfigError("exact mean averaging needs a linear observable");
    const GaussianModel g(m);
    return {F(g.mean_field()), 0.0};
  }
  SamplerConfig sc = cfg.sampler;
  sc.seed = derive_key(cfg.sampler.seed, static_cast<std::uint64_t>(StreamTag::Shift), site_key(shift));
  SampleStream stream(m, sc, initial_field(m));
  std::vector<double> series;
  series.reserve(sc.samples);
  while (stream.next()) series.push_back(F(stream.current()));
  if (series.size() >= kMinBatches * 2) {
    const auto bm = batch_means(series, kMinBatches);
    return {pairwise_sum(series) / static_cast<double>(series.size()), bm.se};
  }
  MomentAccumulator acc;
  for (double v : series) acc.add(v);
  return {acc.mean(), acc.stderr_iid()};
}

}  // namespace

SpatialAverageResult spatial_average_observable(const BondObservable& F, const LatticeBox& base,
                                                const std::vector<Site>& shifts, const SpatialAverageConfig& cfg) {
  if (shifts.empty()) throw DomainError("spatial average needs at least one shift");
  for (const Site& s : shifts)
    if (!base.contains_interior(s + base.offset())) throw DomainError("shift " + to_string(s, base.dim()) + " lies outside the box");

  std::vector<int> volumes = cfg.volume_sequence;
  if (volumes.empty()) volumes.push_back(base.half_side());

  SpatialAverageResult res;
  const std::size_t k = shifts.size();
  std::vector<ShiftEstimate> est(volumes.size() * k);
  std::vector<std::string> errs(est.size());
  parallel_for(est.size(), cfg.threads, [&](std::size_t i) {
    const std::size_t vi = i / k, si = i % k;
    try {
      const LatticeBox box(base.dim(), volumes[vi], base.offset() + shifts[si]);
      est[i] = estimate_on(F, box, cfg, shifts[si]);
    } catch (const std::exception& e) {
      errs[i] = e.what();
    }
  });

  double outer = 0.0, outer_var = 0.0;
  for (std::size_t vi = 0; vi < volumes.size(); ++vi) {
    double s = 0.0, v = 0.0;
    std::size_t done = 0;
    for (std::size_t si = 0; si < k; ++si) {
      const std::size_t i = vi * k + si;
      if (!errs[i].empty()) {
        if (res.complete) res.failure = errs[i];
        res.complete = false;
        continue;
      }
      res.per_shift.push_back(est[i].value);
      res.per_shift_se.push_back(est[i].se);
      s += est[i].value;
      v += est[i].se * est[i].se;
      ++done;
    }
    if (done == 0) continue;
    outer += s / static_cast<double>(done);
    outer_var += v / static_cast<double>(done * done);
  }
  const double nv = static_cast<double>(volumes.size());
  res.estimate = outer / nv;
  res.se = std::sqrt(outer_var) / nv;
  return res;
}

}  // namespace gglab
