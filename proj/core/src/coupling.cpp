#include "gglab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gglab/gradient.hpp"
#include "gglab/stats.hpp"

namespace gglab {

namespace {

double free_distance_sq(const HeightField& a, const HeightField& b) {
  double s = 0.0;
  for (std::uint32_t i : a.domain().free_sites()) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

CouplingSeries coupled_run(const GibbsModel& m, HeightField phi0, HeightField phibar0, double T, double h, double r,
                           std::uint64_t seed, const CouplingOptions& opts) {
  if (!(T > 0)) throw ConfigError("coupled run needs T > 0");
  if (!(phi0.box() == m.box()) || !(phibar0.box() == m.box())) throw DomainError("replicas must live on the model box");
  for (std::size_t i = 0; i < m.box().site_count(); ++i)
    if (m.domain->is_frozen(i) && phi0[i] != phibar0[i]) throw DomainError("replicas disagree on a frozen site");

  LangevinIntegrator ia(m, h, opts.guard), ib(m, h, opts.guard);
  NoiseStream noise(derive_key(seed, static_cast<std::uint64_t>(StreamTag::Chain)));
  std::vector<double> g(ia.free_count(), 0.0);

  CouplingSeries out;
  out.h = h;
  out.r = r;
  out.cadence = opts.cadence > 0 ? opts.cadence : default_cadence(m, h);
  const auto steps = static_cast<std::size_t>(std::llround(T / h));

  auto record = [&](std::size_t n) {
    out.points.push_back({static_cast<double>(n) * h, weighted_distance(phi0, phibar0, r), free_distance_sq(phi0, phibar0),
                          energy(phi0, m), energy(phibar0, m)});
  };
  record(0);
  for (std::size_t n = 1; n <= steps; ++n) {
    if (opts.noise) {
      noise.fill(g);
      ia.step_with_noise(phi0, g);
      ib.step_with_noise(phibar0, g);
    } else {
      ia.step_deterministic(phi0);
      ib.step_deterministic(phibar0);
    }
    if (n % out.cadence == 0 || n == steps) record(n);
  }
  out.final_state = CoupledState{std::move(phi0), std::move(phibar0), static_cast<double>(steps) * h};
  return out;
}

ContractionFit contraction_rate(const CouplingSeries& series) {
  ContractionFit fit;
  double peak = 0.0;
  for (const auto& p : series.points) peak = std::max(peak, p.dr);
  if (peak == 0.0) {
    fit.rate = std::numeric_limits<double>::infinity();
    fit.exact_zero = true;
    return fit;
  }
  const double floor = 1e2 * std::numeric_limits<double>::epsilon() * peak;
  std::vector<double> t, y;
  for (const auto& p : series.points) {
    if (p.dr > floor) {
      t.push_back(p.t);
      y.push_back(std::log(p.dr));
    }
  }
  const std::size_t start = t.size() / 2;
  if (t.size() - start < 2) throw NonDecayError("too few samples above the noise floor to fit a rate");
  const std::span<const double> ts(t.data() + start, t.size() - start), ys(y.data() + start, y.size() - start);
  const LinearFit lf = fit_line(ts, ys);
  if (lf.slope >= 0) throw NonDecayError("weighted distance does not decay");
  fit.rate = -lf.slope;
  fit.residual_rms = lf.residual_rms;
  fit.points_used = ts.size();
  return fit;
}

}  // namespace gglab
