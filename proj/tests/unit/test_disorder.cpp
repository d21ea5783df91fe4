#include <gtest/gtest.h>

#include <cmath>

#include "gglab/disorder.hpp"
#include "gglab/error.hpp"
#include "gglab/stats.hpp"

using namespace gglab;

namespace {

DisorderLaw gaussian(double s) {
  DisorderLaw l;
  l.kind = DisorderLawKind::Gaussian;
  l.scale = s;
  return l;
}

DisorderLaw conductance(double k, double delta) {
  DisorderLaw l;
  l.kind = DisorderLawKind::Conductance;
  l.kappa = k;
  l.delta = delta;
  return l;
}

}  // namespace

TEST(Disorder, ValuesFollowAbsolutePosition) {
  auto a = std::make_shared<const LatticeBox>(2, 4);
  auto b = std::make_shared<const LatticeBox>(2, 3, make_site({2, -1}));
  const auto xa = sample_disorder(DisorderModel::A, a, gaussian(1.0), 11);
  const auto xb = sample_disorder(DisorderModel::A, b, gaussian(1.0), 11);
  std::size_t shared = 0;
  for (std::size_t i = 0; i < b->site_count(); ++i) {
    if (auto j = a->index_of(b->site(i))) {
      EXPECT_EQ(xb.field(i), xa.field(*j));
      ++shared;
    }
  }
  EXPECT_GT(shared, 20u);
}

TEST(Disorder, ShiftMovesTheEnvironment) {
  auto box = std::make_shared<const LatticeBox>(2, 3);
  const auto x = sample_disorder(DisorderModel::A, box, gaussian(1.0), 5);
  const Site v = make_site({1, 2});
  const auto y = x.shifted(v);
  for (std::size_t i = 0; i < y.box->site_count(); ++i) {
    const Site s = y.box->site(i);
    EXPECT_EQ(y.field(i), x.field(*box->index_of(s - v)));
  }
  auto bbox = std::make_shared<const LatticeBox>(2, 2);
  const auto c = sample_disorder(DisorderModel::B, bbox, conductance(1.0, 0.5), 5);
  const auto cs = c.shifted(v);
  for (std::size_t e = 0; e < cs.box->edges().size(); ++e) {
    const Edge& ed = cs.box->edges()[e];
    const auto orig = bbox->edge_between(cs.box->site(ed.lo) - v, cs.box->site(ed.hi) - v);
    ASSERT_TRUE(orig.has_value());
    EXPECT_EQ(cs.conductance(e), c.conductance(orig->first));
  }
}

TEST(Disorder, NegatedIsExactMirror) {
  auto box = std::make_shared<const LatticeBox>(3, 2);
  const auto x = sample_disorder(DisorderModel::A, box, gaussian(0.7), 9);
  const auto n = x.negated();
  for (std::size_t i = 0; i < box->site_count(); ++i) EXPECT_EQ(n.field(i), -x.field(i));
  EXPECT_TRUE(n.negated_stream);
  EXPECT_EQ(n.negated().values, x.values);
}

TEST(Disorder, LawMoments) {
  auto box = std::make_shared<const LatticeBox>(2, 40);
  for (auto kind : {DisorderLawKind::Gaussian, DisorderLawKind::Rademacher, DisorderLawKind::Uniform}) {
    DisorderLaw l;
    l.kind = kind;
    l.scale = 1.5;
    const auto x = sample_disorder(DisorderModel::A, box, l, 3);
    MomentAccumulator acc;
    for (double v : x.values) acc.add(v);
    const double n = static_cast<double>(x.values.size());
    EXPECT_NEAR(acc.mean(), 0.0, 5 * std::sqrt(law_variance(l) / n));
    EXPECT_NEAR(acc.variance(), law_variance(l), 0.05 * law_variance(l)) << to_string(kind);
  }
  const auto law = conductance(2.0, 0.3);
  const auto c = sample_disorder(DisorderModel::B, box, law, 3);
  for (double k : c.values) {
    EXPECT_GE(k, 2.0 * 0.7);
    EXPECT_LE(k, 2.0 * 1.3);
  }
  EXPECT_NEAR(law_variance(law), 4.0 * 0.09 / 3.0, 1e-15);
}

TEST(Disorder, LawValidation) {
  EXPECT_THROW(validate_law(DisorderModel::A, conductance(1, 0.1)), ConfigError);
  EXPECT_THROW(validate_law(DisorderModel::B, gaussian(1)), ConfigError);
  EXPECT_THROW(validate_law(DisorderModel::B, conductance(1, 1.0)), ConfigError);
  EXPECT_THROW(validate_law(DisorderModel::A, gaussian(-1)), ConfigError);
  EXPECT_NO_THROW(validate_law(DisorderModel::B, conductance(1, 0.99)));
  auto box = std::make_shared<const LatticeBox>(1, 2);
  const auto z = no_disorder(DisorderModel::B, box, 3.0);
  for (double k : z.values) EXPECT_EQ(k, 3.0);
}
