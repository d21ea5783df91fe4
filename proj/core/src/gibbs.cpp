#include "gglab/gibbs.hpp"

#include <algorithm>
#include <cmath>

#include "gglab/error.hpp"
#include "gglab/stats.hpp"

namespace gglab {

BoundarySpec BoundarySpec::tilted(std::vector<double> u) {
  BoundarySpec b;
  b.kind = Kind::Tilt;
  b.tilt = std::move(u);
  return b;
}

BoundarySpec BoundarySpec::from_function(std::function<double(const Site&)> f) {
  BoundarySpec b;
  b.kind = Kind::Custom;
  b.custom = std::move(f);
  return b;
}

double tilt_value(std::span<const double> u, const Site& x) {
  double v = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) v += u[i] * x[static_cast<int>(i)];
  return v;
}

double BoundarySpec::value_at(const Site& x) const {
  switch (kind) {
    case Kind::Zero: break;
    case Kind::Tilt: return tilt_value(tilt, x);
    case Kind::Custom: return custom ? custom(x) : 0.0;
  }
  return 0.0;
}

double GibbsModel::c1() const {
  if (!potential.uniformly_convex()) return potential.c1();
  return *std::min_element(kappa.begin(), kappa.end());
}

double GibbsModel::c2() const {
  if (!potential.uniformly_convex()) return potential.c2();
  return *std::max_element(kappa.begin(), kappa.end()) + (potential.c2() - potential.quadratic_part());
}

namespace {

GibbsModel base_model(std::shared_ptr<const Domain> domain, const Potential& potential, const BoundarySpec& boundary) {
  const LatticeBox& box = domain->box();
  if (boundary.kind == BoundarySpec::Kind::Tilt && boundary.tilt.size() != static_cast<std::size_t>(box.dim()))
    throw ConfigError("tilt vector length must equal the dimension");
  GibbsModel m;
  m.domain = domain;
  m.potential = potential;
  m.kappa.assign(box.edges().size(), potential.quadratic_part());
  m.field.assign(box.site_count(), 0.0);
  m.psi.assign(box.site_count(), 0.0);
  for (std::size_t i = 0; i < box.site_count(); ++i)
    if (domain->is_frozen(i)) m.psi[i] = boundary.value_at(box.site(i));
  if (boundary.kind != BoundarySpec::Kind::Tilt) {
    for (const auto& [x, v] : boundary.pinned) {
      const auto i = box.index_or_throw(x);
      if (!domain->is_frozen(i)) throw DomainError("pinned value given for a free site " + to_string(x, box.dim()));
      m.psi[i] = v;
    }
  }
  return m;
}

}  // namespace

GibbsModel make_model(std::shared_ptr<const Domain> domain, const Potential& potential, const BoundarySpec& boundary) {
  return base_model(std::move(domain), potential, boundary);
}

GibbsModel make_model(std::shared_ptr<const Domain> domain, const Potential& potential, const DisorderSample& disorder,
                      const BoundarySpec& boundary) {
  if (!disorder.box || !(*disorder.box == domain->box())) throw DomainError("disorder sample lives on a different box");
  GibbsModel m = base_model(domain, potential, boundary);
  m.model = disorder.model;
  if (disorder.model == DisorderModel::A) {
    m.field = disorder.values;
  } else {
    if (potential.kind() == PotentialKind::Mixture) throw ConfigError("mixture potential is only available for model A");
    m.kappa = disorder.values;
  }
  return m;
}

HeightField::HeightField(std::shared_ptr<const Domain> domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (values_.size() != domain_->box().site_count()) throw DomainError("height field size does not match the box");
}

HeightField HeightField::shifted(const Site& v) const {
  auto dom = std::make_shared<const Domain>(domain_->shifted(v));
  const auto map = shift_index_map(box(), dom->box(), v);
  std::vector<double> vals(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) vals[i] = values_[map[i]];
  return HeightField(dom, std::move(vals));
}

HeightField initial_field(const GibbsModel& m) {
  std::vector<double> v(m.box().site_count(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (m.domain->is_frozen(i)) v[i] = m.psi[i];
  return HeightField(m.domain, std::move(v));
}

namespace {

void check_field(const HeightField& phi, const GibbsModel& m) {
  if (!(phi.box() == m.box()) || phi.values().size() != m.box().site_count())
    throw DomainError("height field and model live on different boxes");
}

}  // namespace

double energy(const HeightField& phi, const GibbsModel& m) {
  check_field(phi, m);
  const LatticeBox& box = m.box();
  const auto& v = phi.values();
  double h = 0.0;
  for (std::size_t e = 0; e < box.edges().size(); ++e) {
    const Edge& ed = box.edges()[e];
    h += m.bond_value(e, v[ed.hi] - v[ed.lo]);
  }
  for (std::size_t i = 0; i < box.interior_count(); ++i) h += m.field[i] * v[i];
  return h;
}

std::vector<double> drift(const HeightField& phi, const GibbsModel& m) {
  check_field(phi, m);
  LangevinIntegrator integ(m, 1.0);
  std::vector<double> out(m.domain->free_count());
  integ.compute_drift(phi, out);
  return out;
}

void NoiseStream::fill(std::span<double> g) {
  for (double& x : g) x = normal_(rng_);
}

LangevinIntegrator::LangevinIntegrator(const GibbsModel& m, double h, double guard)
    : m_(&m), h_(h), guard_(guard), deg_(m.box().degree()), free_(m.domain->free_sites()) {
  if (!(h > 0)) throw ConfigError("Langevin step must be positive");
  const LatticeBox& box = m.box();
  nbr_.resize(free_.size() * static_cast<std::size_t>(deg_));
  kap_.resize(nbr_.size());
  for (std::size_t j = 0; j < free_.size(); ++j) {
    for (int k = 0; k < deg_; ++k) {
      const std::size_t slot = j * static_cast<std::size_t>(deg_) + static_cast<std::size_t>(k);
      nbr_[slot] = box.neighbor(free_[j], k);
      kap_[slot] = m.kappa[box.incident_edge(free_[j], k)];
    }
  }
  buf_.resize(free_.size());
  noise_.resize(free_.size());
}

namespace {

template <class Rest>
void drift_loop(const std::vector<std::uint32_t>& free, const std::vector<std::uint32_t>& nbr,
                const std::vector<double>& kap, const std::vector<double>& field, int deg, const double* v,
                double* out, Rest rest) {
  const std::size_t dg = static_cast<std::size_t>(deg);
  for (std::size_t j = 0; j < free.size(); ++j) {
    const double vy = v[free[j]];
    double acc = -field[free[j]];
    const std::size_t base = j * dg;
    for (std::size_t k = 0; k < dg; ++k) {
      const double s = v[nbr[base + k]] - vy;
      acc += kap[base + k] * s + rest(s);
    }
    out[j] = acc;
  }
}

}  // namespace

void LangevinIntegrator::compute_drift(const HeightField& phi, std::span<double> out) const {
  const double* v = phi.values().data();
  const Potential& pot = m_->potential;
  switch (pot.kind()) {
    case PotentialKind::Quadratic:
      drift_loop(free_, nbr_, kap_, m_->field, deg_, v, out.data(), [](double) { return 0.0; });
      break;
    case PotentialKind::PerturbedConvex: {
      const double eps = pot.spec().eps;
      drift_loop(free_, nbr_, kap_, m_->field, deg_, v, out.data(),
                 [eps](double s) { return eps * s / std::sqrt(1.0 + s * s); });
      break;
    }
    case PotentialKind::Mixture:
      drift_loop(free_, nbr_, kap_, m_->field, deg_, v, out.data(), [&pot](double s) { return pot.rest_d1(s); });
      break;
  }
}

void LangevinIntegrator::apply(HeightField& phi, std::span<const double> g, double scale) {
  compute_drift(phi, buf_);
  double* v = phi.values().data();
  bool bad = false;
  for (std::size_t j = 0; j < free_.size(); ++j) {
    double& y = v[free_[j]];
    y += h_ * buf_[j] + (scale != 0.0 ? scale * g[j] : 0.0);
    bad |= !(std::abs(y) <= guard_);
  }
  if (bad) throw DivergenceError("Langevin field exceeded the divergence guard");
}

void LangevinIntegrator::step(HeightField& phi, NoiseStream& noise) {
  noise.fill(noise_);
  apply(phi, noise_, std::sqrt(2.0 * h_));
}

void LangevinIntegrator::step_with_noise(HeightField& phi, std::span<const double> g) {
  if (g.size() != free_.size()) throw DomainError("noise vector size does not match the free sites");
  apply(phi, g, std::sqrt(2.0 * h_));
}

void LangevinIntegrator::step_deterministic(HeightField& phi) { apply(phi, noise_, 0.0); }

double default_step(const GibbsModel& m) { return 0.1 / (m.box().degree() * m.c2()); }

double default_burn_in(const GibbsModel& m) { return 10.0 / (m.c1() * m.box().smallest_dirichlet_eigenvalue()); }

std::size_t default_cadence(const GibbsModel& m, double h) {
  return static_cast<std::size_t>(std::ceil(0.1 / (h * m.c1() * m.box().smallest_dirichlet_eigenvalue())));
}

GaussianModel::GaussianModel(const GibbsModel& m, SpdSolver::Method method) : m_(&m) {
  if (!m.is_quadratic()) throw ConfigError("exact Gaussian sampling needs a quadratic potential");
  solver_ = std::make_shared<SpdSolver>(assemble_precision(*m.domain, m.kappa), method);
  Vector b = boundary_flux(*m.domain, m.kappa, m.psi);
  const auto& fr = m.domain->free_sites();
  for (std::size_t j = 0; j < fr.size(); ++j) b[static_cast<Eigen::Index>(j)] -= m.field[fr[j]];
  mean_ = solver_->solve(b);
}

HeightField GaussianModel::mean_field() const {
  HeightField f = initial_field(*m_);
  const auto& fr = m_->domain->free_sites();
  for (std::size_t j = 0; j < fr.size(); ++j) f.values()[fr[j]] = mean_[static_cast<Eigen::Index>(j)];
  return f;
}

HeightField GaussianModel::sample(NoiseStream& noise) const {
  Vector z(static_cast<Eigen::Index>(mean_.size()));
  noise.fill(std::span<double>(z.data(), static_cast<std::size_t>(z.size())));
  const Vector x = mean_ + solver_->correlate(z);
  HeightField f = initial_field(*m_);
  const auto& fr = m_->domain->free_sites();
  for (std::size_t j = 0; j < fr.size(); ++j) f.values()[fr[j]] = x[static_cast<Eigen::Index>(j)];
  return f;
}

Vector GaussianModel::covariance_column(std::size_t z) const {
  const int jz = m_->domain->free_index(z);
  if (jz < 0) return Vector::Zero(mean_.size());
  Vector e = Vector::Zero(mean_.size());
  e[jz] = 1.0;
  return solver_->solve(e);
}

double GaussianModel::covariance(std::size_t x, std::size_t z) const {
  const int jx = m_->domain->free_index(x);
  if (jx < 0) return 0.0;
  return covariance_column(z)[jx];
}

double GaussianModel::variance_of(const Vector& v) const {
  if (v.size() != mean_.size()) throw DomainError("functional size does not match the free sites");
  if (v.squaredNorm() == 0) throw DomainError("degenerate linear functional");
  return v.dot(solver_->solve(v));
}

SampleStream::SampleStream(const GibbsModel& m, const SamplerConfig& cfg, HeightField start)
    : m_(&m),
      cfg_(cfg),
      integ_(m, cfg.h > 0 ? cfg.h : default_step(m), cfg.guard),
      noise_(derive_key(cfg.seed, static_cast<std::uint64_t>(StreamTag::Chain))),
      phi_(std::move(start)) {
  thinning_ = cfg.thinning > 0 ? cfg.thinning : default_cadence(m, integ_.h());
  const double tb = cfg.burn_in >= 0 ? cfg.burn_in : default_burn_in(m);
  burn_steps_ = static_cast<std::size_t>(std::ceil(tb / integ_.h()));
}

void SampleStream::advance(std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (cfg_.noise)
      integ_.step(phi_, noise_);
    else
      integ_.step_deterministic(phi_);
  }
  steps_ += n;
}

bool SampleStream::next() {
  if (produced_ >= cfg_.samples) return false;
  if (!burned_) {
    advance(burn_steps_);
    burned_ = true;
  }
  advance(thinning_);
  ++produced_;
  trace_.push_back({steps_, static_cast<double>(steps_) * integ_.h(), energy(phi_, *m_)});
  return true;
}

double SampleStream::energy_autocorrelation() const {
  std::vector<double> e;
  e.reserve(trace_.size());
  for (const auto& p : trace_) e.push_back(p.energy);
  return integrated_autocorrelation(e);
}

SampleStream equilibrate_and_sample(const GibbsModel& m, const SamplerConfig& cfg) {
  return SampleStream(m, cfg, initial_field(m));
}

}  // namespace gglab
