#pragma once

// Shortest words for free metabelian elements: find a lattice walk of minimal
// length from 0 to the endpoint whose signed edge counts equal the flow.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fmb/errors.hpp"
#include "fmb/lattice.hpp"
#include "fmb/metabelian.hpp"
#include "fmb/word.hpp"

namespace fmb {

struct LengthBounds {
  std::int64_t lower = 0;
  std::int64_t upper = 0;
  Word witness;
};

inline std::int64_t length_lower_bound(const MetabelianElement& g) {
  return std::max(g.flow.total_variation(), g.endpoint.l1_norm());
}

// Letter order used for tie-breaking: +1 < -1 < +2 < -2 < ...
inline std::vector<int> letter_order(int d) {
  std::vector<int> out;
  for (int i = 1; i <= d; ++i) {
    out.push_back(i);
    out.push_back(-i);
  }
  return out;
}

namespace detail {

// Small union-find over dense indices.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Lattice points packed into 64 bits for the exact search: 15 bits per
// coordinate, up to 4 dimensions.
class PointPacker {
 public:
  static constexpr int kBits = 15;
  static constexpr std::int64_t kOffset = std::int64_t{1} << (kBits - 1);

  explicit PointPacker(int d) : d_(d) {
    if (d > 4) throw RangeError("exact geodesic search supports d <= 4");
  }

  std::uint64_t pack(const std::vector<std::int64_t>& c) const {
    std::uint64_t key = 0;
    for (int i = 0; i < d_; ++i) {
      const std::int64_t v = c[static_cast<std::size_t>(i)] + kOffset;
      if (v < 1 || v >= (std::int64_t{1} << kBits) - 1) throw RangeError("coordinates too large for exact geodesic search");
      key |= static_cast<std::uint64_t>(v) << (kBits * i);
    }
    return key;
  }

  std::uint64_t move(std::uint64_t key, int signed_axis) const {
    const auto shift = kBits * (std::abs(signed_axis) - 1);
    return signed_axis > 0 ? key + (std::uint64_t{1} << shift) : key - (std::uint64_t{1} << shift);
  }

  // Edge key: packed base in the low 60 bits, axis (1..4) above.
  static std::uint64_t edge(std::uint64_t base, int axis) { return base | (static_cast<std::uint64_t>(axis) << 60); }
  static std::uint64_t edge_base(std::uint64_t e) { return e & ((std::uint64_t{1} << 60) - 1); }
  static int edge_axis(std::uint64_t e) { return static_cast<int>(e >> 60); }

 private:
  int d_;
};

class ExactSearch {
 public:
  ExactSearch(const MetabelianElement& g) : d_(g.d), packer_(g.d), order_(letter_order(g.d)) {
    for (const auto& [e, m] : g.flow.entries()) {
      remaining_[PointPacker::edge(packer_.pack(e.base.coords()), e.axis)] = m;
      sum_abs_ += std::abs(m);
    }
    target_ = packer_.pack(g.endpoint.coords());
    start_ = packer_.pack(LatticePoint::origin(static_cast<std::size_t>(d_)).coords());
  }

  // Depth-first search for a walk of exactly `length` steps, letters tried in
  // tie-break order so the first hit is the lexicographically least.
  std::optional<std::vector<int>> run(std::int64_t length) {
    path_.clear();
    if (dfs(start_, length)) return path_;
    return std::nullopt;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  // Lower bound on the remaining walk length: every unit of |remaining| costs a
  // step, and joining k separate pieces (support components, the current
  // position, the target) needs k-1 off-support edges walked out and back.
  std::int64_t bound(std::uint64_t pos) {
    if (sum_abs_ == 0) return pos == target_ ? 0 : 2;  // cannot happen with consistent divergence
    verts_.clear();
    auto index_of = [&](std::uint64_t p) {
      auto it = std::find(verts_.begin(), verts_.end(), p);
      if (it != verts_.end()) return static_cast<std::size_t>(it - verts_.begin());
      verts_.push_back(p);
      return verts_.size() - 1;
    };
    index_of(pos);
    index_of(target_);
    edges_.clear();
    for (const auto& [e, m] : remaining_) {
      if (m == 0) continue;
      const std::uint64_t b = PointPacker::edge_base(e);
      const std::size_t i = index_of(b);
      const std::size_t j = index_of(packer_.move(b, PointPacker::edge_axis(e)));
      edges_.emplace_back(i, j);
    }
    DisjointSets ds(verts_.size());
    std::size_t components = verts_.size();
    for (auto [i, j] : edges_)
      if (ds.unite(i, j)) --components;
    return sum_abs_ + 2 * static_cast<std::int64_t>(components - 1);
  }

  void apply(std::uint64_t pos, int letter, int dir) {
    const int axis = std::abs(letter);
    const std::uint64_t base = letter > 0 ? pos : packer_.move(pos, letter);
    const std::uint64_t key = PointPacker::edge(base, axis);
    std::int64_t& r = remaining_[key];
    const std::int64_t before = std::abs(r);
    r -= (letter > 0 ? 1 : -1) * dir;
    sum_abs_ += std::abs(r) - before;
  }

  bool dfs(std::uint64_t pos, std::int64_t left) {
    ++nodes_;
    if (left == 0) return sum_abs_ == 0 && pos == target_;
    if (sum_abs_ > left) return false;
    if (bound(pos) > left) return false;
    for (int letter : order_) {
      apply(pos, letter, +1);
      path_.push_back(letter);
      if (dfs(packer_.move(pos, letter), left - 1)) return true;
      path_.pop_back();
      apply(pos, letter, -1);
    }
    return false;
  }

  int d_;
  PointPacker packer_;
  std::vector<int> order_;
  std::unordered_map<std::uint64_t, std::int64_t> remaining_;
  std::int64_t sum_abs_ = 0;
  std::uint64_t target_ = 0;
  std::uint64_t start_ = 0;
  std::vector<int> path_;
  std::uint64_t nodes_ = 0;
  std::vector<std::uint64_t> verts_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

}  // namespace detail

// Exact minimum by iterative deepening. Returns nullopt when no word of length
// <= budget exists (the caller must treat that as "budget exceeded").
inline std::optional<Word> min_word_exact(const MetabelianElement& g, std::int64_t budget) {
  const std::int64_t lb = length_lower_bound(g);
  if (budget < lb) return std::nullopt;
  const std::int64_t parity = g.flow.total_variation() % 2;
  detail::ExactSearch search(g);
  for (std::int64_t len = lb; len <= budget; ++len) {
    if (len % 2 != parity) continue;
    if (auto path = search.run(len)) return Word{g.d, std::move(*path)};
  }
  return std::nullopt;
}

// Postman-style upper bound: traverse every flow edge |f| times in its net
// direction, connect the pieces (and 0, endpoint) by back-and-forth staircase
// connectors, and read off a directed Euler path from 0 to the endpoint.
inline Word min_word_upper(const MetabelianElement& g) {
  const std::size_t d = static_cast<std::size_t>(g.d);
  const LatticePoint origin = LatticePoint::origin(d);

  std::map<LatticePoint, std::size_t> index;
  std::vector<LatticePoint> verts;
  auto vid = [&](const LatticePoint& p) {
    auto [it, inserted] = index.try_emplace(p, verts.size());
    if (inserted) verts.push_back(p);
    return it->second;
  };
  struct Arc {
    std::size_t from, to;
    int letter;
  };
  std::vector<Arc> arcs;

  vid(origin);
  vid(g.endpoint);
  for (const auto& [e, m] : g.flow.entries()) {
    const std::size_t b = vid(e.base);
    const std::size_t h = vid(e.head());
    for (std::int64_t k = 0; k < std::abs(m); ++k) {
      if (m > 0) {
        arcs.push_back({b, h, e.axis});
      } else {
        arcs.push_back({h, b, -e.axis});
      }
    }
  }

  // Greedy spanning connector (Prim over L1 distance): repeatedly attach the
  // outside vertex nearest to the part already connected to the origin.
  const std::size_t base_count = verts.size();
  detail::DisjointSets ds(base_count);
  for (const auto& a : arcs) ds.unite(a.from, a.to);
  std::vector<std::vector<std::size_t>> members(base_count);
  for (std::size_t i = 0; i < base_count; ++i) members[ds.find(i)].push_back(i);

  std::vector<char> inside(base_count, 0);
  std::vector<std::int64_t> dist(base_count, -1);
  std::vector<std::size_t> from(base_count, 0);
  std::vector<std::size_t> fresh;
  auto mark = [&](std::size_t v) {
    if (v >= base_count) {
      fresh.push_back(v);
      return;
    }
    if (inside[v]) return;
    for (std::size_t u : members[ds.find(v)]) {
      inside[u] = 1;
      fresh.push_back(u);
    }
  };
  mark(0);
  for (;;) {
    for (std::size_t v : fresh)
      for (std::size_t o = 0; o < base_count; ++o) {
        if (inside[o]) continue;
        const std::int64_t dd = (verts[o] - verts[v]).l1_norm();
        if (dist[o] < 0 || dd < dist[o]) {
          dist[o] = dd;
          from[o] = v;
        }
      }
    fresh.clear();
    std::size_t target = base_count;
    for (std::size_t o = 0; o < base_count; ++o)
      if (!inside[o] && (target == base_count || dist[o] < dist[target])) target = o;
    if (target == base_count) break;

    LatticePoint pos = verts[from[target]];
    for (int s : canonical_path(verts[target] - pos).steps) {
      const std::size_t a = vid(pos);
      pos.step(s);
      const std::size_t b = vid(pos);
      arcs.push_back({a, b, s});
      arcs.push_back({b, a, -s});
      mark(b);
    }
  }

  // Hierholzer with deterministic adjacency order.
  std::vector<std::vector<std::size_t>> out(verts.size());
  for (std::size_t k = 0; k < arcs.size(); ++k) out[arcs[k].from].push_back(k);
  auto rank = [](int letter) { return 2 * std::abs(letter) + (letter < 0 ? 1 : 0); };
  for (auto& list : out)
    std::stable_sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) { return rank(arcs[a].letter) < rank(arcs[b].letter); });
  std::vector<std::size_t> next(verts.size(), 0);
  std::vector<std::size_t> vstack{0};
  std::vector<int> astack;
  std::vector<int> letters;
  while (!vstack.empty()) {
    const std::size_t v = vstack.back();
    if (next[v] < out[v].size()) {
      const Arc& a = arcs[out[v][next[v]++]];
      vstack.push_back(a.to);
      astack.push_back(a.letter);
    } else {
      vstack.pop_back();
      if (!astack.empty()) {
        letters.push_back(astack.back());
        astack.pop_back();
      }
    }
  }
  std::reverse(letters.begin(), letters.end());
  if (letters.size() != arcs.size()) throw Error("min_word_upper: flow and endpoint are inconsistent");
  return Word{g.d, std::move(letters)};
}

inline LengthBounds length_bounds(const MetabelianElement& g) {
  Word w = min_word_upper(g);
  return {length_lower_bound(g), static_cast<std::int64_t>(w.length()), std::move(w)};
}

}  // namespace fmb
