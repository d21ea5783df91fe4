#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gglab {

inline constexpr int kMaxDim = 4;
inline constexpr std::uint32_t kNone = 0xffffffffu;

// Lattice point. Coordinates past the box dimension stay zero, so the
// defaulted comparison is lexicographic in the used coordinates.
struct Site {
  std::array<int, kMaxDim> c{};

  int& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  int operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  friend auto operator<=>(const Site&, const Site&) = default;
  friend Site operator+(Site a, const Site& b) {
    for (int i = 0; i < kMaxDim; ++i) a[i] += b[i];
    return a;
  }
  friend Site operator-(Site a, const Site& b) {
    for (int i = 0; i < kMaxDim; ++i) a[i] -= b[i];
    return a;
  }
  Site operator-() const { return Site{} - *this; }
};

Site make_site(std::initializer_list<int> coords);
Site unit_vector(int axis, int sign = 1);
int l1_norm(const Site& x);
int sup_norm(const Site& x);
double euclidean_norm(const Site& x);
std::string to_string(const Site& x, int d);

// Directed nearest-neighbour bond (x_b, y_b).
struct Bond {
  Site tail;
  Site head;

  Bond reversed() const { return {head, tail}; }
  friend auto operator<=>(const Bond&, const Bond&) = default;
};

Site shift(const Site& x, const Site& v);
Bond shift(const Bond& b, const Site& v);
std::vector<Bond> shift(std::vector<Bond> bonds, const Site& v);

// Undirected edge between two box sites; hi = lo + e_axis.
struct Edge {
  std::uint32_t lo;
  std::uint32_t hi;
  int axis;
};

struct BondSet {
  std::vector<Bond> inner;     // both orientations, both ends interior
  std::vector<Bond> boundary;  // tail outside, head inside
};

class LatticeBox;

// Unit square s, s+e_a, s+e_a+e_b, s+e_b walked in that order.
struct Plaquette {
  std::uint32_t corner;
  int axis_a;
  int axis_b;
  std::array<std::uint32_t, 4> edge;
  std::array<int, 4> sign;  // +1 when the loop runs lo -> hi along the edge

  std::array<Bond, 4> bonds(const LatticeBox& box) const;
};

// Interior Lambda = offset + [-N, N]^d and its outer L1 boundary.
// Interior sites take indices [0, |Lambda|) in lexicographic order, boundary
// sites follow, also lexicographic.
class LatticeBox {
 public:
  LatticeBox(int d, int N, Site offset = {});

  int dim() const { return d_; }
  int half_side() const { return n_; }
  const Site& offset() const { return offset_; }

  std::size_t interior_count() const { return n_int_; }
  std::size_t boundary_count() const { return sites_.size() - n_int_; }
  std::size_t site_count() const { return sites_.size(); }
  bool is_interior(std::size_t i) const { return i < n_int_; }
  bool contains_interior(const Site& x) const;

  std::optional<std::uint32_t> index_of(const Site& x) const;
  std::uint32_t index_or_throw(const Site& x) const;
  const Site& site(std::size_t i) const { return sites_[i]; }

  int degree() const { return 2 * d_; }
  // k = 2*axis for +e_axis, 2*axis+1 for -e_axis; i must be interior
  std::uint32_t neighbor(std::size_t i, int k) const { return nbr_[i * static_cast<std::size_t>(2 * d_) + static_cast<std::size_t>(k)]; }
  std::uint32_t incident_edge(std::size_t i, int k) const { return inc_[i * static_cast<std::size_t>(2 * d_) + static_cast<std::size_t>(k)]; }
  // edge from site i to i + e_axis, kNone if absent
  std::uint32_t up_edge(std::size_t i, int axis) const { return up_[i * static_cast<std::size_t>(d_) + static_cast<std::size_t>(axis)]; }

  const std::vector<Edge>& edges() const { return edges_; }
  // Undirected edge joining two sites with its orientation sign relative to
  // (a -> b); nullopt if not an edge of the box.
  std::optional<std::pair<std::uint32_t, int>> edge_between(const Site& a, const Site& b) const;
  Bond bond_of(std::uint32_t edge, int sign) const;

  LatticeBox shifted(const Site& v) const { return LatticeBox(d_, n_, offset_ + v); }
  double smallest_dirichlet_eigenvalue() const;

  friend bool operator==(const LatticeBox& a, const LatticeBox& b) {
    return a.d_ == b.d_ && a.n_ == b.n_ && a.offset_ == b.offset_;
  }

 private:
  int d_;
  int n_;
  Site offset_;
  std::size_t n_int_ = 0;
  std::size_t side_ = 0;
  std::vector<Site> sites_;
  std::vector<std::uint32_t> nbr_;
  std::vector<std::uint32_t> inc_;
  std::vector<std::uint32_t> up_;
  std::vector<Edge> edges_;
};

LatticeBox build_box(int d, int N, Site offset = {});
BondSet enumerate_bonds(const LatticeBox& box);
std::vector<Plaquette> enumerate_plaquettes(const LatticeBox& box);

// For every site of `to`, the index in `from` of the site y - v.
// Throws DomainError when some preimage lies outside `from`.
std::vector<std::uint32_t> shift_index_map(const LatticeBox& from, const LatticeBox& to, const Site& v);

// Box plus a frozen mask. Boundary sites are always frozen; pinned or
// excluded interior sites are frozen too (zero walk, fixed height).
class Domain {
 public:
  explicit Domain(std::shared_ptr<const LatticeBox> box);
  Domain(std::shared_ptr<const LatticeBox> box, const std::vector<Site>& pinned);

  static Domain where(std::shared_ptr<const LatticeBox> box, const std::function<bool(const Site&)>& keep_free);
  // free sites: interior x with |x - center| < radius
  static Domain ball(std::shared_ptr<const LatticeBox> box, double radius, const Site& center = {});

  const LatticeBox& box() const { return *box_; }
  const std::shared_ptr<const LatticeBox>& box_ptr() const { return box_; }
  bool is_frozen(std::size_t i) const { return free_index_[i] < 0; }
  std::int32_t free_index(std::size_t i) const { return free_index_[i]; }
  const std::vector<std::uint32_t>& free_sites() const { return free_; }
  std::size_t free_count() const { return free_.size(); }
  const std::vector<Site>& pinned() const { return pinned_; }

  // same frozen pattern on box + v
  Domain shifted(const Site& v) const;

 private:
  void finish(const std::vector<std::uint8_t>& frozen);

  std::shared_ptr<const LatticeBox> box_;
  std::vector<std::int32_t> free_index_;
  std::vector<std::uint32_t> free_;
  std::vector<Site> pinned_;
};

}  // namespace gglab
