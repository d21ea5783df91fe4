#include "gglab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gglab/error.hpp"

namespace gglab {

Site make_site(std::initializer_list<int> coords) {
  if (coords.size() > static_cast<std::size_t>(kMaxDim)) throw DomainError("site has too many coordinates");
  Site s;
  int i = 0;
  for (int c : coords) s[i++] = c;
  return s;
}

Site unit_vector(int axis, int sign) {
  Site s;
  s[axis] = sign;
  return s;
}

int l1_norm(const Site& x) {
  int r = 0;
  for (int c : x.c) r += std::abs(c);
  return r;
}

int sup_norm(const Site& x) {
  int r = 0;
  for (int c : x.c) r = std::max(r, std::abs(c));
  return r;
}

double euclidean_norm(const Site& x) {
  double r = 0;
  for (int c : x.c) r += static_cast<double>(c) * c;
  return std::sqrt(r);
}

std::string to_string(const Site& x, int d) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < d; ++i) os << (i ? "," : "") << x[i];
  os << ')';
  return os.str();
}

Site shift(const Site& x, const Site& v) { return x + v; }
Bond shift(const Bond& b, const Site& v) { return {b.tail + v, b.head + v}; }
std::vector<Bond> shift(std::vector<Bond> bonds, const Site& v) {
  for (auto& b : bonds) b = shift(b, v);
  return bonds;
}

std::array<Bond, 4> Plaquette::bonds(const LatticeBox& box) const {
  const Site s = box.site(corner);
  const Site ea = unit_vector(axis_a), eb = unit_vector(axis_b);
  return {Bond{s, s + ea}, Bond{s + ea, s + ea + eb}, Bond{s + ea + eb, s + eb}, Bond{s + eb, s}};
}

LatticeBox::LatticeBox(int d, int N, Site offset) : d_(d), n_(N), offset_(offset) {
  if (d < 1 || d > kMaxDim) throw DomainError("box dimension must be in [1, 4]");
  if (N < 1) throw DomainError("box half-side must be >= 1");
  for (int i = d; i < kMaxDim; ++i)
    if (offset[i] != 0) throw DomainError("offset has coordinates beyond the box dimension");

  side_ = static_cast<std::size_t>(2 * N + 1);
  n_int_ = 1;
  for (int i = 0; i < d; ++i) n_int_ *= side_;

  sites_.reserve(n_int_ + static_cast<std::size_t>(2 * d) * (n_int_ / side_));
  for (std::size_t k = 0; k < n_int_; ++k) {
    Site s = offset;
    std::size_t r = k;
    for (int i = d - 1; i >= 0; --i) {
      s[i] += static_cast<int>(r % side_) - N;
      r /= side_;
    }
    sites_.push_back(s);
  }

  // boundary by face enumeration: exactly one coordinate sits at +-(N+1)
  std::vector<Site> bd;
  for (int axis = 0; axis < d; ++axis) {
    for (int sign : {-1, 1}) {
      for (std::size_t k = 0; k < n_int_ / side_; ++k) {
        Site s = offset;
        std::size_t r = k;
        for (int i = d - 1; i >= 0; --i) {
          if (i == axis) continue;
          s[i] += static_cast<int>(r % side_) - N;
          r /= side_;
        }
        s[axis] += sign * (N + 1);
        bd.push_back(s);
      }
    }
  }
  std::sort(bd.begin(), bd.end());
  sites_.insert(sites_.end(), bd.begin(), bd.end());
  if (sites_.size() >= kNone) throw DomainError("box too large for 32-bit site indices");

  const std::size_t deg = static_cast<std::size_t>(2 * d);
  nbr_.assign(n_int_ * deg, kNone);
  for (std::size_t i = 0; i < n_int_; ++i) {
    for (int axis = 0; axis < d; ++axis) {
      nbr_[i * deg + 2 * axis] = index_or_throw(sites_[i] + unit_vector(axis, 1));
      nbr_[i * deg + 2 * axis + 1] = index_or_throw(sites_[i] + unit_vector(axis, -1));
    }
  }

  up_.assign(sites_.size() * static_cast<std::size_t>(d), kNone);
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    for (int axis = 0; axis < d; ++axis) {
      auto j = index_of(sites_[i] + unit_vector(axis, 1));
      if (!j) continue;
      if (!is_interior(i) && !is_interior(*j)) continue;
      up_[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(axis)] = static_cast<std::uint32_t>(edges_.size());
      edges_.push_back({static_cast<std::uint32_t>(i), *j, axis});
    }
  }

  inc_.assign(n_int_ * deg, kNone);
  for (std::size_t i = 0; i < n_int_; ++i) {
    for (int axis = 0; axis < d; ++axis) {
      inc_[i * deg + 2 * axis] = up_edge(i, axis);
      inc_[i * deg + 2 * axis + 1] = up_edge(nbr_[i * deg + 2 * axis + 1], axis);
    }
  }
}

bool LatticeBox::contains_interior(const Site& x) const {
  for (int i = 0; i < kMaxDim; ++i) {
    const int rel = x[i] - offset_[i];
    if (i >= d_) {
      if (rel != 0) return false;
    } else if (rel < -n_ || rel > n_) {
      return false;
    }
  }
  return true;
}

std::optional<std::uint32_t> LatticeBox::index_of(const Site& x) const {
  if (contains_interior(x)) {
    std::size_t k = 0;
    for (int i = 0; i < d_; ++i) k = k * side_ + static_cast<std::size_t>(x[i] - offset_[i] + n_);
    return static_cast<std::uint32_t>(k);
  }
  auto first = sites_.begin() + static_cast<std::ptrdiff_t>(n_int_);
  auto it = std::lower_bound(first, sites_.end(), x);
  if (it != sites_.end() && *it == x) return static_cast<std::uint32_t>(it - sites_.begin());
  return std::nullopt;
}

std::uint32_t LatticeBox::index_or_throw(const Site& x) const {
  auto i = index_of(x);
  if (!i) throw DomainError("site " + to_string(x, d_) + " is outside the box");
  return *i;
}

std::optional<std::pair<std::uint32_t, int>> LatticeBox::edge_between(const Site& a, const Site& b) const {
  const Site diff = b - a;
  if (l1_norm(diff) != 1) return std::nullopt;
  int axis = 0;
  while (diff[axis] == 0) ++axis;
  if (axis >= d_) return std::nullopt;
  const Site& lo = diff[axis] > 0 ? a : b;
  auto i = index_of(lo);
  if (!i) return std::nullopt;
  const std::uint32_t e = up_edge(*i, axis);
  if (e == kNone) return std::nullopt;
  return std::make_pair(e, diff[axis] > 0 ? 1 : -1);
}

Bond LatticeBox::bond_of(std::uint32_t edge, int sign) const {
  const Edge& e = edges_[edge];
  return sign > 0 ? Bond{sites_[e.lo], sites_[e.hi]} : Bond{sites_[e.hi], sites_[e.lo]};
}

double LatticeBox::smallest_dirichlet_eigenvalue() const {
  return 2.0 * d_ * (1.0 - std::cos(std::numbers::pi / (2.0 * n_ + 2.0)));
}

LatticeBox build_box(int d, int N, Site offset) { return LatticeBox(d, N, offset); }

BondSet enumerate_bonds(const LatticeBox& box) {
  BondSet out;
  for (const Edge& e : box.edges()) {
    const Site& lo = box.site(e.lo);
    const Site& hi = box.site(e.hi);
    if (box.is_interior(e.lo) && box.is_interior(e.hi)) {
      out.inner.push_back({lo, hi});
      out.inner.push_back({hi, lo});
    } else if (box.is_interior(e.hi)) {
      out.boundary.push_back({lo, hi});
    } else {
      out.boundary.push_back({hi, lo});
    }
  }
  std::sort(out.inner.begin(), out.inner.end());
  std::sort(out.boundary.begin(), out.boundary.end());
  return out;
}

std::vector<Plaquette> enumerate_plaquettes(const LatticeBox& box) {
  std::vector<Plaquette> out;
  const int d = box.dim();
  for (std::size_t s = 0; s < box.site_count(); ++s) {
    for (int a = 0; a < d; ++a) {
      for (int b = a + 1; b < d; ++b) {
        const std::uint32_t e0 = box.up_edge(s, a);
        const std::uint32_t e3 = box.up_edge(s, b);
        if (e0 == kNone || e3 == kNone) continue;
        const std::uint32_t sa = box.edges()[e0].hi;
        const std::uint32_t sb = box.edges()[e3].hi;
        const std::uint32_t e1 = box.up_edge(sa, b);
        const std::uint32_t e2 = box.up_edge(sb, a);
        if (e1 == kNone || e2 == kNone) continue;
        out.push_back({static_cast<std::uint32_t>(s), a, b, {e0, e1, e2, e3}, {1, 1, -1, -1}});
      }
    }
  }
  return out;
}

std::vector<std::uint32_t> shift_index_map(const LatticeBox& from, const LatticeBox& to, const Site& v) {
  std::vector<std::uint32_t> map(to.site_count());
  for (std::size_t i = 0; i < to.site_count(); ++i) {
    auto j = from.index_of(to.site(i) - v);
    if (!j) throw DomainError("shifted access to " + to_string(to.site(i) - v, from.dim()) + " outside the source box");
    map[i] = *j;
  }
  return map;
}

Domain::Domain(std::shared_ptr<const LatticeBox> box) : box_(std::move(box)) {
  std::vector<std::uint8_t> frozen(box_->site_count(), 1);
  std::fill(frozen.begin(), frozen.begin() + static_cast<std::ptrdiff_t>(box_->interior_count()), 0);
  finish(frozen);
}

Domain::Domain(std::shared_ptr<const LatticeBox> box, const std::vector<Site>& pinned) : box_(std::move(box)), pinned_(pinned) {
  std::vector<std::uint8_t> frozen(box_->site_count(), 1);
  std::fill(frozen.begin(), frozen.begin() + static_cast<std::ptrdiff_t>(box_->interior_count()), 0);
  for (const Site& p : pinned) {
    auto i = box_->index_of(p);
    if (!i || !box_->is_interior(*i)) throw DomainError("pinned site " + to_string(p, box_->dim()) + " is not interior");
    frozen[*i] = 1;
  }
  finish(frozen);
}

Domain Domain::where(std::shared_ptr<const LatticeBox> box, const std::function<bool(const Site&)>& keep_free) {
  Domain dom(box);
  std::vector<std::uint8_t> frozen(box->site_count(), 1);
  for (std::size_t i = 0; i < box->interior_count(); ++i) frozen[i] = keep_free(box->site(i)) ? 0 : 1;
  dom.finish(frozen);
  return dom;
}

Domain Domain::ball(std::shared_ptr<const LatticeBox> box, double radius, const Site& center) {
  return where(std::move(box), [&](const Site& x) { return euclidean_norm(x - center) < radius; });
}

Domain Domain::shifted(const Site& v) const {
  auto target = std::make_shared<const LatticeBox>(box_->shifted(v));
  const auto map = shift_index_map(*box_, *target, v);
  Domain out(target);
  std::vector<std::uint8_t> frozen(target->site_count());
  for (std::size_t i = 0; i < map.size(); ++i) frozen[i] = is_frozen(map[i]) ? 1 : 0;
  out.pinned_ = pinned_;
  for (Site& p : out.pinned_) p = p + v;
  out.finish(frozen);
  return out;
}

void Domain::finish(const std::vector<std::uint8_t>& frozen) {
  free_index_.assign(box_->site_count(), -1);
  free_.clear();
  for (std::size_t i = 0; i < frozen.size(); ++i) {
    if (frozen[i]) continue;
    free_index_[i] = static_cast<std::int32_t>(free_.size());
    free_.push_back(static_cast<std::uint32_t>(i));
  }
  if (free_.empty()) throw DomainError("domain has no free sites");
}

}  // namespace gglab
