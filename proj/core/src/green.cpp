#include "gglab/green.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gglab/parallel.hpp"
#include "gglab/rng.hpp"
#include "gglab/stats.hpp"

namespace gglab {

std::string to_string(GreenNormalization n) {
  switch (n) {
    case GreenNormalization::Visits: return "discrete-time-visits";
    case GreenNormalization::OccupationTime: return "continuous-time-occupation";
    case GreenNormalization::PrecisionInverse: return "precision-inverse";
  }
  return "?";
}

GreenTable::GreenTable(std::shared_ptr<const Domain> dom, std::vector<double> kappa, GreenNormalization norm,
                       SpdSolver::Method method)
    : dom_(std::move(dom)), norm_(norm), shared_(std::make_shared<Shared>()) {
  for (double k : kappa)
    if (!(k > 0)) throw DomainError("Green table needs positive conductances");
  shared_->kappa = std::move(kappa);
  shared_->solver = std::make_unique<SpdSolver>(assemble_precision(*dom_, shared_->kappa), method);
}

std::shared_ptr<const Vector> GreenTable::precision_column(std::size_t y) const {
  const auto key = static_cast<std::uint32_t>(y);
  {
    std::lock_guard<std::mutex> lock(shared_->mu);
    auto it = shared_->cache.find(key);
    if (it != shared_->cache.end()) return it->second;
  }
  const int j = dom_->free_index(y);
  Vector e = Vector::Zero(static_cast<Eigen::Index>(dom_->free_count()));
  e[j] = 1.0;
  auto col = std::make_shared<const Vector>(shared_->solver->solve(e));
  std::lock_guard<std::mutex> lock(shared_->mu);
  return shared_->cache.emplace(key, col).first->second;
}

double GreenTable::degree(std::size_t y) const {
  const LatticeBox& box = dom_->box();
  double s = 0.0;
  for (int k = 0; k < box.degree(); ++k) s += shared_->kappa[box.incident_edge(y, k)];
  return s;
}

double GreenTable::conversion_factor(std::size_t y, GreenNormalization to) const {
  auto visits_scale = [&](GreenNormalization n) { return n == GreenNormalization::Visits ? degree(y) : 1.0; };
  return visits_scale(to) / visits_scale(norm_);
}

GreenTable GreenTable::converted(GreenNormalization to) const {
  GreenTable out = *this;
  out.norm_ = to;
  return out;
}

Vector GreenTable::column(std::size_t y) const {
  if (dom_->free_index(y) < 0) return Vector::Zero(static_cast<Eigen::Index>(dom_->free_count()));
  Vector c = *precision_column(y);
  if (norm_ == GreenNormalization::Visits) c *= degree(y);
  return c;
}

std::vector<double> GreenTable::column_on_box(std::size_t y) const {
  std::vector<double> out(dom_->box().site_count(), 0.0);
  if (dom_->free_index(y) < 0) return out;
  const Vector c = column(y);
  const auto& fr = dom_->free_sites();
  for (std::size_t j = 0; j < fr.size(); ++j) out[fr[j]] = c[static_cast<Eigen::Index>(j)];
  return out;
}

double GreenTable::operator()(std::size_t x, std::size_t y) const {
  const int jx = dom_->free_index(x);
  if (jx < 0 || dom_->free_index(y) < 0) return 0.0;
  const double v = (*precision_column(y))[jx];
  return norm_ == GreenNormalization::Visits ? v * degree(y) : v;
}

double GreenTable::at(const Site& x, const Site& y) const {
  const LatticeBox& box = dom_->box();
  return (*this)(box.index_or_throw(x), box.index_or_throw(y));
}

Eigen::MatrixXd GreenTable::dense() const {
  const auto& fr = dom_->free_sites();
  const auto n = static_cast<Eigen::Index>(fr.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) g.col(j) = column(fr[static_cast<std::size_t>(j)]);
  return g;
}

GreenTable srw_green_exact(std::shared_ptr<const Domain> dom) {
  const std::size_t ne = dom->box().edges().size();
  return GreenTable(std::move(dom), std::vector<double>(ne, 1.0), GreenNormalization::Visits);
}

GreenTable srw_green_exact(std::shared_ptr<const LatticeBox> box) {
  return srw_green_exact(std::make_shared<const Domain>(std::move(box)));
}

double visits_residual(const GreenTable& visits) {
  if (visits.normalization() != GreenNormalization::Visits) throw Error("residual is defined for the visits table");
  const Eigen::MatrixXd g = visits.dense();
  const SparseMatrix& a = visits.solver().matrix();
  const auto& fr = visits.domain().free_sites();
  Eigen::MatrixXd r = a * g;
  for (Eigen::Index i = 0; i < r.rows(); ++i) r.row(i) /= visits.degree(fr[static_cast<std::size_t>(i)]);
  r -= Eigen::MatrixXd::Identity(r.rows(), r.cols());
  return r.cwiseAbs().maxCoeff();
}

std::vector<double> green_center_growth(int d, const std::vector<int>& sizes) {
  std::vector<double> out;
  for (int n : sizes) {
    auto box = std::make_shared<const LatticeBox>(d, n);
    auto dom = std::make_shared<const Domain>(Domain::ball(box, n));
    const GreenTable g = srw_green_exact(dom);
    const auto o = box->index_or_throw(Site{});
    out.push_back(g(o, o));
  }
  return out;
}

double whole_space_asymptote(int d, double r) {
  if (d < 3) throw DomainError("whole-space Green function needs d >= 3");
  const double wd = std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
  const double ad = 2.0 / ((d - 2) * wd);
  return ad * std::pow(r, 2.0 - d);
}

Vector whole_space_column(const GreenTable& table, const Site& z) {
  const Domain& dom = table.domain();
  const LatticeBox& box = dom.box();
  const int d = box.dim();
  if (d < 3) throw DomainError("whole-space Green function needs d >= 3");
  for (double k : table.kappa())
    if (k != 1.0) throw DomainError("whole-space completion needs unit conductances");
  const auto zi = box.index_or_throw(z);
  if (dom.free_index(zi) < 0) throw DomainError("source site must be free");

  std::vector<double> far(box.site_count(), 0.0);
  for (std::size_t i = 0; i < box.site_count(); ++i)
    if (dom.is_frozen(i)) far[i] = whole_space_asymptote(d, euclidean_norm(box.site(i) - z));
  const Vector ext = table.solver().solve(boundary_flux(dom, table.kappa(), far));

  const double deg = table.degree(zi);
  Vector g = table.column(zi);
  if (table.normalization() == GreenNormalization::Visits)
    g += ext;
  else
    g += ext / deg;
  return g;
}

DynamicEnvironment::DynamicEnvironment(std::shared_ptr<const Domain> dom, std::vector<double> times,
                                       std::vector<std::vector<double>> rates, double horizon)
    : dom_(std::move(dom)), times_(std::move(times)), rates_(std::move(rates)), horizon_(horizon) {
  if (times_.empty() || times_.size() != rates_.size()) throw DomainError("environment needs one rate field per slice");
  if (times_.front() != 0.0) throw DomainError("environment must start at t = 0");
  for (std::size_t k = 1; k < times_.size(); ++k)
    if (!(times_[k] > times_[k - 1])) throw DomainError("environment slice times must increase");
  for (const auto& r : rates_) {
    if (r.size() != dom_->box().edges().size()) throw DomainError("rate field does not match the box edges");
    for (double v : r)
      if (!(v > 0)) throw DomainError("environment rates must be positive");
  }
}

DynamicEnvironment DynamicEnvironment::static_rates(std::shared_ptr<const Domain> dom, std::vector<double> kappa) {
  return DynamicEnvironment(std::move(dom), {0.0}, {std::move(kappa)}, std::numeric_limits<double>::infinity());
}

DynamicEnvironment DynamicEnvironment::from_trajectory(const GibbsModel& m, HeightField start, double T, double h,
                                                       std::size_t spacing, std::uint64_t seed) {
  if (spacing == 0) spacing = default_cadence(m, h);
  LangevinIntegrator integ(m, h);
  NoiseStream noise(derive_key(seed, static_cast<std::uint64_t>(StreamTag::Chain)));
  const LatticeBox& box = m.box();
  auto snapshot = [&](const HeightField& phi) {
    std::vector<double> a(box.edges().size());
    for (std::size_t e = 0; e < a.size(); ++e) a[e] = m.bond_d2(e, phi[box.edges()[e].hi] - phi[box.edges()[e].lo]);
    return a;
  };
  std::vector<double> times{0.0};
  std::vector<std::vector<double>> rates{snapshot(start)};
  const auto steps = static_cast<std::size_t>(std::llround(T / h));
  for (std::size_t n = 1; n <= steps; ++n) {
    integ.step(start, noise);
    if (n % spacing == 0 && n < steps) {
      times.push_back(static_cast<double>(n) * h);
      rates.push_back(snapshot(start));
    }
  }
  return DynamicEnvironment(m.domain, std::move(times), std::move(rates), static_cast<double>(steps) * h);
}

bool DynamicEnvironment::within(double lo, double hi) const {
  for (const auto& r : rates_)
    for (double v : r)
      if (v < lo || v > hi) return false;
  return true;
}

HsWalkResult hs_walk_green(const DynamicEnvironment& env, const Site& x, const Site& z, std::size_t walkers,
                           std::uint64_t seed, int threads) {
  const Domain& dom = env.domain();
  const LatticeBox& box = dom.box();
  const auto xi = box.index_or_throw(x);
  const auto zi = box.index_or_throw(z);
  if (dom.is_frozen(xi)) throw DomainError("walk must start on a free site");
  if (walkers < 2) throw DomainError("need at least two walkers");
  const int deg = box.degree();
  const std::size_t slices = env.slices();
  const double horizon = env.horizon();

  std::vector<double> occ(walkers, 0.0);
  std::vector<std::uint8_t> late(walkers, 0);
  parallel_for(walkers, threads, [&](std::size_t w) {
    CounterRng rng(derive_key(seed, static_cast<std::uint64_t>(StreamTag::Walker), w));
    std::uint32_t pos = xi;
    double t = 0.0, acc = 0.0;
    std::size_t k = 0;
    double rate[2 * kMaxDim];
    while (true) {
      const auto& a = env.rates(k);
      double total = 0.0;
      for (int j = 0; j < deg; ++j) {
        rate[j] = a[box.incident_edge(pos, j)];
        total += rate[j];
      }
      const double tau = -std::log(rng.uniform_pos()) / total;
      const double end = k + 1 < slices ? env.slice_start(k + 1) : std::numeric_limits<double>::infinity();
      if (t + tau >= end) {
        // memoryless: restart the clock in the next slice
        if (pos == zi) acc += end - t;
        t = end;
        ++k;
        continue;
      }
      if (pos == zi) acc += tau;
      t += tau;
      if (t > horizon) late[w] = 1;
      double pick = rng.uniform() * total;
      int j = 0;
      while (j < deg - 1 && pick >= rate[j]) {
        pick -= rate[j];
        ++j;
      }
      pos = box.neighbor(pos, j);
      if (dom.is_frozen(pos)) break;
    }
    occ[w] = acc;
  });

  HsWalkResult res;
  res.walkers = walkers;
  MomentAccumulator m;
  for (double v : occ) m.add(v);
  res.estimate = m.mean();
  res.se = m.stderr_iid();
  std::size_t n_late = 0;
  for (auto l : late) n_late += l;
  res.beyond_horizon = static_cast<double>(n_late) / static_cast<double>(walkers);
  if (res.beyond_horizon > kHorizonMassLimit)
    throw HorizonError("more than 1% of walkers survive past the stored environment horizon");
  return res;
}

PowerFit fit_power(const std::vector<double>& r, const std::vector<double>& v) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (v[i] <= 0) continue;
    lx.push_back(std::log(r[i]));
    ly.push_back(std::log(v[i]));
  }
  if (lx.size() < 2) throw NumericalError("power fit needs two positive values");
  const LinearFit f = fit_line(lx, ly);
  return {f.slope, std::exp(f.intercept), f.r2};
}

GreenGradientReport green_gradient_diagnostics(const GreenTable& table, const Site& z, const std::vector<double>& radii) {
  if (radii.size() < 2) throw DomainError("insufficient annuli: need at least two radii");
  const Domain& dom = table.domain();
  const LatticeBox& box = dom.box();
  const int d = box.dim();
  const auto zi = box.index_or_throw(z);

  const std::vector<double> g0 = table.column_on_box(zi);
  std::vector<std::vector<double>> gz(static_cast<std::size_t>(d));
  for (int b = 0; b < d; ++b) {
    auto zb = box.index_of(z + unit_vector(b));
    gz[static_cast<std::size_t>(b)] = zb ? table.column_on_box(*zb) : std::vector<double>(box.site_count(), 0.0);
  }
  auto val = [&](const std::vector<double>& col, const Site& x) {
    auto i = box.index_of(x);
    return i ? col[*i] : 0.0;
  };

  GreenGradientReport rep;
  std::vector<double> rs, gs, ms, ps;
  double prev_hi = -1.0;
  for (double R : radii) {
    AnnulusRow row;
    row.radius = R;
    for (std::uint32_t i : dom.free_sites()) {
      const Site& x = box.site(i);
      const double dist = euclidean_norm(x - z);
      if (dist < R || dist > 2 * R || dist <= prev_hi) continue;
      ++row.sites;
      for (int a = 0; a < d; ++a) {
        const Site xa = x + unit_vector(a);
        const double ga = val(g0, xa) - g0[i];
        row.grad_sq_sum += ga * ga;
        row.grad_max = std::max(row.grad_max, std::abs(ga));
        for (int b = 0; b < d; ++b) {
          const auto& gb = gz[static_cast<std::size_t>(b)];
          const double mixed = val(gb, xa) - val(gb, x) - ga;
          row.mixed_sq_sum += mixed * mixed;
        }
      }
    }
    if (row.sites == 0) throw DomainError("insufficient annuli: shell of radius " + std::to_string(R) + " is empty");
    prev_hi = 2 * R;
    rep.rows.push_back(row);
    rs.push_back(R);
    gs.push_back(row.grad_sq_sum);
    ms.push_back(row.mixed_sq_sum);
    ps.push_back(row.grad_max);
  }
  rep.grad_fit = fit_power(rs, gs);
  rep.mixed_fit = fit_power(rs, ms);
  rep.pointwise_fit = fit_power(rs, ps);
  return rep;
}

}  // namespace gglab
