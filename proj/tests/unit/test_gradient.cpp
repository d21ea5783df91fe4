#include <gtest/gtest.h>

#include <cmath>

#include "gglab/gradient.hpp"

using namespace gglab;

namespace {

HeightField random_field(int d, int N, std::uint64_t key) {
  auto box = std::make_shared<const LatticeBox>(d, N);
  auto dom = std::make_shared<const Domain>(box);
  NoiseStream g(key);
  std::vector<double> v(box->site_count());
  g.fill(v);  // boundary values too
  return HeightField(dom, v);
}

}  // namespace

TEST(Gradient, PlaquetteAndReconstructionRoundTrip) {
  for (int d = 1; d <= 3; ++d) {
    const HeightField phi = random_field(d, 3, 10 + d);
    const GradientField eta = gradient_of(phi);
    const auto rep = check_plaquettes(eta);
    EXPECT_TRUE(rep.ok);
    EXPECT_LT(rep.worst, 1e-12);
    const Site c{};
    const double phi0 = phi.at(c);
    std::vector<int> order(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) order[a] = d - 1 - a;
    for (const auto& ord : {std::vector<int>{}, order}) {
      const HeightField back = reconstruct(eta, phi0, ord);
      for (std::size_t i = 0; i < phi.box().site_count(); ++i) EXPECT_NEAR(back[i], phi[i], 1e-12) << "d=" << d;
    }
  }
}

TEST(Gradient, Antisymmetry) {
  const HeightField phi = random_field(2, 2, 3);
  const GradientField eta = gradient_of(phi);
  for (const Bond& b : enumerate_bonds(phi.box()).inner) {
    EXPECT_EQ(eta(b), -eta(b.reversed()));
    EXPECT_DOUBLE_EQ(eta(b), phi.at(b.head) - phi.at(b.tail));
  }
}

TEST(Gradient, PlaquetteViolationIsRefused) {
  const HeightField phi = random_field(2, 3, 5);
  auto vals = gradient_of(phi).edge_values();
  vals[17] += 1e-3;
  const GradientField bad(phi.domain().box_ptr(), vals);
  const auto rep = check_plaquettes(bad);
  EXPECT_FALSE(rep.ok);
  EXPECT_NEAR(rep.worst, 1e-3, 1e-12);
  EXPECT_THROW(reconstruct(bad, 0.0), PlaquetteError);
  // in d = 1 there are no plaquettes, every edge field is a gradient
  const HeightField line = random_field(1, 4, 6);
  auto lv = gradient_of(line).edge_values();
  lv[2] += 1.0;
  EXPECT_TRUE(check_plaquettes(GradientField(line.domain().box_ptr(), lv)).ok);
}

TEST(Gradient, TiltFieldReconstructsPlane) {
  auto box = std::make_shared<const LatticeBox>(3, 2);
  const std::vector<double> u = {0.5, -1.0, 2.0};
  const GradientField eta = tilt_field(box, u);
  for (const Bond& b : enumerate_bonds(*box).inner) EXPECT_DOUBLE_EQ(eta(b), tilt_value(u, b.head - b.tail));
  const HeightField h = reconstruct(eta, 0.0);
  for (std::size_t i = 0; i < box->site_count(); ++i) EXPECT_NEAR(h[i], tilt_value(u, box->site(i)), 1e-12);
}

TEST(Gradient, WeightedDistanceSingleBond) {
  auto box = std::make_shared<const LatticeBox>(2, 3);
  const std::vector<double> zero(box->edges().size(), 0.0);
  auto one = zero;
  const auto e = box->edge_between(Site{}, unit_vector(0));
  ASSERT_TRUE(e.has_value());
  one[e->first] = 1.0;
  const GradientField a(box, zero), b(box, one);
  for (double r : {0.0, 0.1, 0.5}) {
    // bond (0, e1) has tail weight 1, its reverse has tail e1 with weight exp(-2r)
    EXPECT_NEAR(weighted_distance(a, b, r), 1.0 + std::exp(-2 * r), 1e-15);
    EXPECT_NEAR(weighted_norm_sq(b, r), 1.0 + std::exp(-2 * r), 1e-15);
  }
}

TEST(Gradient, WeightedDistanceFromHeights) {
  const HeightField p = random_field(2, 3, 1);
  HeightField q = random_field(2, 3, 2);
  for (double r : {0.0, 0.05}) {
    EXPECT_NEAR(weighted_distance(p, q, r), weighted_distance(gradient_of(p), gradient_of(q), r), 1e-10);
  }
  // constant offsets do not move gradients
  HeightField p2 = p;
  for (double& v : p2.values()) v += 3.0;
  EXPECT_NEAR(weighted_distance(p, p2, 0.1), 0.0, 1e-20);
}

TEST(Gradient, ShiftedGradient) {
  const HeightField phi = random_field(2, 2, 8);
  const GradientField eta = gradient_of(phi);
  const Site v = make_site({2, 1});
  const GradientField sh = eta.shifted(v);
  for (const Bond& b : enumerate_bonds(sh.box()).inner) EXPECT_EQ(sh(b), eta(shift(b, -v)));
  const GradientField viaf = gradient_of(phi.shifted(v));
  EXPECT_EQ(viaf.edge_values(), sh.edge_values());
}

TEST(Gradient, BondObservables) {
  const HeightField phi = random_field(2, 2, 4);
  const Bond b0 = {Site{}, unit_vector(0)}, b1 = {unit_vector(1), Site{}};
  const auto lin = BondObservable::linear({b0, b1}, {2.0, -1.0});
  EXPECT_DOUBLE_EQ(lin(phi), 2.0 * (phi.at(b0.head) - phi.at(b0.tail)) - (phi.at(b1.head) - phi.at(b1.tail)));
  EXPECT_THROW(BondObservable::linear({b0}, {1.0, 2.0}), DomainError);
}

TEST(Gradient, SpatialAverageOfTiltIsExact) {
  SpatialAverageConfig cfg;
  cfg.tilt = {0.75, -0.25};
  cfg.mode = AverageMode::ExactMean;
  cfg.volume_sequence = {3, 4};
  const LatticeBox base(2, 4);
  const std::vector<Site> shifts = {Site{}, make_site({1, 0}), make_site({0, -1}), make_site({1, 1})};
  const auto F = BondObservable::single({Site{}, unit_vector(0)});
  const auto r = spatial_average_observable(F, base, shifts, cfg);
  EXPECT_TRUE(r.complete);
  EXPECT_EQ(r.per_shift.size(), 8u);
  EXPECT_NEAR(r.estimate, 0.75, 1e-10);

  cfg.mode = AverageMode::Langevin;
  cfg.volume_sequence = {};
  cfg.sampler.samples = 400;
  cfg.sampler.seed = 5;
  const auto mc = spatial_average_observable(F, base, shifts, cfg);
  EXPECT_TRUE(mc.complete);
  EXPECT_GT(mc.se, 0.0);
  EXPECT_NEAR(mc.estimate, 0.75, 4 * mc.se);

  const auto outside = BondObservable::single({make_site({-1, -1}), make_site({0, -1})});
  const auto far = spatial_average_observable(outside, LatticeBox(2, 1), {make_site({1, 1})}, cfg);
  EXPECT_FALSE(far.complete);
}
