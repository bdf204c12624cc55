#pragma once

// Lattice geometry on Z^d viewed as the 1-skeleton E^d: points, oriented
// edges, paths and integer edge flows (1-chains).

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fmb/errors.hpp"

namespace fmb {

class LatticePoint {
 public:
  LatticePoint() = default;
  LatticePoint(std::initializer_list<std::int64_t> c) : coords_(c) {}
  explicit LatticePoint(std::vector<std::int64_t> c) : coords_(std::move(c)) {}

  static LatticePoint origin(std::size_t d) { return LatticePoint(std::vector<std::int64_t>(d, 0)); }

  // axis is 1-based.
  static LatticePoint unit(std::size_t d, int axis, std::int64_t sign = 1) {
    LatticePoint p = origin(d);
    p.coords_.at(static_cast<std::size_t>(axis - 1)) = sign;
    return p;
  }

  std::size_t dim() const { return coords_.size(); }
  const std::vector<std::int64_t>& coords() const { return coords_; }
  std::int64_t operator[](std::size_t i) const { return coords_[i]; }

  // Moves one unit along a signed axis index (+i / -i).
  void step(int signed_axis) {
    auto& c = coords_.at(static_cast<std::size_t>(std::abs(signed_axis) - 1));
    c = checked_add(c, signed_axis > 0 ? 1 : -1);
  }

  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](std::int64_t c) { return c == 0; });
  }

  std::int64_t l1_norm() const {
    std::int64_t s = 0;
    for (auto c : coords_) s = checked_add(s, c < 0 ? checked_neg(c) : c);
    return s;
  }

  LatticePoint& operator+=(const LatticePoint& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] = checked_add(coords_[i], o.coords_[i]);
    return *this;
  }
  LatticePoint& operator-=(const LatticePoint& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] = checked_add(coords_[i], checked_neg(o.coords_[i]));
    return *this;
  }
  friend LatticePoint operator+(LatticePoint a, const LatticePoint& b) { return a += b; }
  friend LatticePoint operator-(LatticePoint a, const LatticePoint& b) { return a -= b; }
  LatticePoint operator-() const {
    LatticePoint r = *this;
    for (auto& c : r.coords_) c = checked_neg(c);
    return r;
  }

  auto operator<=>(const LatticePoint&) const = default;
  bool operator==(const LatticePoint&) const = default;

 private:
  void require_same_dim(const LatticePoint& o) const {
    if (o.dim() != dim()) throw DimensionMismatch("lattice points of different dimension");
  }

  std::vector<std::int64_t> coords_;
};

// Geometric edge from base to base + e_axis; axis is 1-based.
struct Edge {
  LatticePoint base;
  int axis = 1;

  LatticePoint head() const { return base + LatticePoint::unit(base.dim(), axis); }

  auto operator<=>(const Edge&) const = default;
  bool operator==(const Edge&) const = default;
};

struct LatticePath {
  LatticePoint start;
  std::vector<int> steps;  // signed axis indices

  std::size_t dim() const { return start.dim(); }
  std::size_t length() const { return steps.size(); }

  LatticePoint end() const {
    LatticePoint p = start;
    for (int s : steps) p.step(s);
    return p;
  }

  std::vector<LatticePoint> vertices() const {
    std::vector<LatticePoint> out;
    out.reserve(steps.size() + 1);
    out.push_back(start);
    for (int s : steps) {
      out.push_back(out.back());
      out.back().step(s);
    }
    return out;
  }
};

// Finite integer 1-chain on E^d. Entries with zero multiplicity are never
// stored, so structural equality is equality of chains.
class EdgeFlow {
 public:
  using Map = std::map<Edge, std::int64_t>;

  EdgeFlow() = default;
  EdgeFlow(std::initializer_list<std::pair<const Edge, std::int64_t>> init) {
    for (const auto& [e, m] : init) add(e, m);
  }

  void add(const Edge& e, std::int64_t mult) {
    if (mult == 0) return;
    auto [it, inserted] = entries_.try_emplace(e, mult);
    if (!inserted) {
      it->second = checked_add(it->second, mult);
      if (it->second == 0) entries_.erase(it);
    }
  }

  std::int64_t at(const Edge& e) const {
    auto it = entries_.find(e);
    return it == entries_.end() ? 0 : it->second;
  }

  const Map& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  // Sum of |multiplicity| over the support.
  std::int64_t total_variation() const {
    std::int64_t s = 0;
    for (const auto& [e, m] : entries_) s = checked_add(s, m < 0 ? checked_neg(m) : m);
    return s;
  }

  EdgeFlow& operator+=(const EdgeFlow& o) {
    for (const auto& [e, m] : o.entries_) add(e, m);
    return *this;
  }
  EdgeFlow& operator-=(const EdgeFlow& o) {
    for (const auto& [e, m] : o.entries_) add(e, checked_neg(m));
    return *this;
  }
  friend EdgeFlow operator+(EdgeFlow a, const EdgeFlow& b) { return a += b; }
  friend EdgeFlow operator-(EdgeFlow a, const EdgeFlow& b) { return a -= b; }
  EdgeFlow operator-() const {
    EdgeFlow r;
    for (const auto& [e, m] : entries_) r.entries_.emplace(e, checked_neg(m));
    return r;
  }

  bool operator==(const EdgeFlow&) const = default;

 private:
  Map entries_;
};

using VertexMap = std::map<LatticePoint, std::int64_t>;

enum class PathRule {
  axis_order,          // all axis-1 moves, then axis-2, ...
  reverse_axis_order,  // axis d first, down to axis 1
};

// Deterministic choice of a path tau_v from the origin to every lattice point.
struct PathSystem {
  PathRule rule = PathRule::axis_order;
};

inline LatticePath canonical_path(const LatticePoint& v, PathSystem ps = {}) {
  LatticePath p{LatticePoint::origin(v.dim()), {}};
  p.steps.reserve(static_cast<std::size_t>(v.l1_norm()));
  const int d = static_cast<int>(v.dim());
  auto emit = [&](int axis) {
    const std::int64_t c = v[static_cast<std::size_t>(axis - 1)];
    const int s = c >= 0 ? axis : -axis;
    for (std::int64_t k = 0; k < std::abs(c); ++k) p.steps.push_back(s);
  };
  if (ps.rule == PathRule::axis_order) {
    for (int a = 1; a <= d; ++a) emit(a);
  } else {
    for (int a = d; a >= 1; --a) emit(a);
  }
  return p;
}

// Signed traversal count of every edge: +1 per positive traversal, -1 per
// reverse traversal.
inline EdgeFlow flow_of_path(const LatticePath& p) {
  EdgeFlow f;
  LatticePoint pos = p.start;
  for (int s : p.steps) {
    const int axis = std::abs(s);
    if (s > 0) {
      f.add(Edge{pos, axis}, 1);
      pos.step(s);
    } else {
      pos.step(s);
      f.add(Edge{pos, axis}, -1);
    }
  }
  return f;
}

// Net inflow at every vertex.
inline VertexMap divergence(const EdgeFlow& f) {
  VertexMap div;
  auto bump = [&](const LatticePoint& u, std::int64_t m) {
    auto [it, inserted] = div.try_emplace(u, m);
    if (!inserted) {
      it->second = checked_add(it->second, m);
      if (it->second == 0) div.erase(it);
    }
  };
  for (const auto& [e, m] : f.entries()) {
    bump(e.head(), m);
    bump(e.base, checked_neg(m));
  }
  return div;
}

inline bool is_cycle(const EdgeFlow& f) { return divergence(f).empty(); }

inline EdgeFlow translate_flow(const EdgeFlow& f, const LatticePoint& v) {
  EdgeFlow r;
  for (const auto& [e, m] : f.entries()) r.add(Edge{e.base + v, e.axis}, m);
  return r;
}

}  // namespace fmb
