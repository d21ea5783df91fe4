#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

#include "gglab/error.hpp"
#include "gglab/lattice.hpp"
#include "gglab/linalg.hpp"
#include "oracles.hpp"

using namespace gglab;

namespace {

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

TEST(Lattice, SiteCounts) {
  for (int d = 1; d <= 4; ++d)
    for (int N : {1, 2, 3}) {
      if (d == 4 && N > 2) continue;
      const LatticeBox box(d, N);
      const std::size_t side = static_cast<std::size_t>(2 * N + 1);
      EXPECT_EQ(box.interior_count(), ipow(side, d));
      EXPECT_EQ(box.boundary_count(), static_cast<std::size_t>(2 * d) * ipow(side, d - 1));
    }
}

TEST(Lattice, BoundaryMatchesBruteForceScan) {
  for (int d = 1; d <= 3; ++d)
    for (int N : {1, 2, 4}) {
      const LatticeBox box(d, N);
      std::vector<Site> got;
      for (std::size_t i = box.interior_count(); i < box.site_count(); ++i) got.push_back(box.site(i));
      EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
      EXPECT_EQ(got, oracle::boundary_scan(d, N)) << "d=" << d << " N=" << N;
    }
}

TEST(Lattice, IndexRoundTripAndOffset) {
  const Site off = make_site({3, -2, 1});
  const LatticeBox box(3, 2, off);
  for (std::size_t i = 0; i < box.site_count(); ++i) EXPECT_EQ(box.index_of(box.site(i)), i);
  EXPECT_TRUE(box.contains_interior(off));
  EXPECT_FALSE(box.contains_interior(off + unit_vector(0, 3)));
  EXPECT_FALSE(box.index_of(off + unit_vector(0, 5)).has_value());
  EXPECT_THROW(box.index_or_throw(off + unit_vector(1, 7)), DomainError);
}

TEST(Lattice, NeighboursAndEdges) {
  const LatticeBox box(2, 3);
  for (std::size_t i = 0; i < box.interior_count(); ++i)
    for (int k = 0; k < box.degree(); ++k) {
      const Site y = box.site(box.neighbor(i, k));
      const Site step = unit_vector(k / 2, k % 2 ? -1 : 1);
      EXPECT_EQ(y, box.site(i) + step);
      const Edge& e = box.edges()[box.incident_edge(i, k)];
      EXPECT_EQ(box.site(e.hi) - box.site(e.lo), unit_vector(e.axis));
    }
  // each edge has an interior end; interior-interior plus interior-boundary
  const std::size_t side = 7;
  EXPECT_EQ(box.edges().size(), 2 * (side - 1) * side + 2 * 2 * side);
}

TEST(Lattice, BondEnumeration) {
  const LatticeBox box(2, 2);
  const BondSet bs = enumerate_bonds(box);
  std::set<Bond> inner(bs.inner.begin(), bs.inner.end());
  EXPECT_EQ(inner.size(), bs.inner.size());
  for (const Bond& b : bs.inner) {
    EXPECT_TRUE(box.contains_interior(b.tail) && box.contains_interior(b.head));
    EXPECT_TRUE(inner.count(b.reversed()));
    EXPECT_EQ(l1_norm(b.head - b.tail), 1);
  }
  for (const Bond& b : bs.boundary) {
    EXPECT_FALSE(box.contains_interior(b.tail));
    EXPECT_TRUE(box.contains_interior(b.head));
  }
  EXPECT_EQ(bs.boundary.size(), box.boundary_count());
}

TEST(Lattice, PlaquettesCloseUp) {
  for (int d : {2, 3}) {
    const int N = 2;
    const LatticeBox box(d, N);
    const auto ps = enumerate_plaquettes(box);
    for (const auto& p : ps) {
      const auto bonds = p.bonds(box);
      for (int i = 0; i < 4; ++i) EXPECT_EQ(bonds[i].head, bonds[(i + 1) % 4].tail);
    }
    // brute force: unit squares whose four edges all touch the interior
    auto inside = [&](const Site& x) {
      for (int a = 0; a < d; ++a)
        if (std::abs(x[a]) > N) return false;
      return true;
    };
    auto is_edge = [&](const Site& x, const Site& y) { return inside(x) || inside(y); };
    std::size_t want = 0;
    const int side = 2 * N + 3;
    std::size_t total = ipow(static_cast<std::size_t>(side), d);
    for (std::size_t n = 0; n < total; ++n) {
      Site s{};
      std::size_t r = n;
      for (int a = 0; a < d; ++a) {
        s[a] = static_cast<int>(r % side) - N - 1;
        r /= side;
      }
      for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
          const Site sa = s + unit_vector(a), sb = s + unit_vector(b), sab = sa + unit_vector(b);
          if (is_edge(s, sa) && is_edge(sa, sab) && is_edge(sb, sab) && is_edge(s, sb)) ++want;
        }
    }
    EXPECT_EQ(ps.size(), want) << "d=" << d;
  }
}

TEST(Lattice, ShiftIndexMap) {
  const auto from = LatticeBox(2, 3);
  const auto to = LatticeBox(2, 1, make_site({1, -1}));
  const Site v = make_site({1, -1});
  const auto map = shift_index_map(from, to, v);
  ASSERT_EQ(map.size(), to.site_count());
  for (std::size_t i = 0; i < to.site_count(); ++i) EXPECT_EQ(from.site(map[i]), to.site(i) - v);
  EXPECT_THROW(shift_index_map(LatticeBox(2, 1), LatticeBox(2, 1, make_site({3, 0})), make_site({1, 0})), DomainError);
}

TEST(Lattice, DomainMasks) {
  auto box = std::make_shared<const LatticeBox>(2, 4);
  const Domain full(box);
  EXPECT_EQ(full.free_count(), box->interior_count());
  const Domain pinned(box, {Site{}});
  EXPECT_EQ(pinned.free_count(), box->interior_count() - 1);
  EXPECT_TRUE(pinned.is_frozen(*box->index_of(Site{})));
  const Domain ball = Domain::ball(box, 2.5);
  for (std::size_t i = 0; i < box->site_count(); ++i)
    EXPECT_EQ(ball.is_frozen(i), !(box->is_interior(i) && euclidean_norm(box->site(i)) < 2.5));
  const Domain moved = ball.shifted(make_site({1, 0}));
  EXPECT_EQ(moved.free_count(), ball.free_count());
}

TEST(Lattice, RejectsBadShapes) {
  EXPECT_THROW(LatticeBox(0, 3), DomainError);
  EXPECT_THROW(LatticeBox(5, 1), DomainError);
  EXPECT_THROW(LatticeBox(2, 0), DomainError);
}

TEST(Lattice, DirichletEigenvalue) {
  for (int d : {1, 2, 3}) {
    auto box = std::make_shared<const LatticeBox>(d, 3);
    const Domain dom(box);
    const std::vector<double> kappa(box->edges().size(), 1.0);
    const Eigen::MatrixXd a = Eigen::MatrixXd(assemble_precision(dom, kappa));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    EXPECT_NEAR(box->smallest_dirichlet_eigenvalue(), es.eigenvalues()(0), 1e-10) << "d=" << d;
  }
}
