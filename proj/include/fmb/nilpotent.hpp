#pragma once

// Free nilpotent group of class 2: an element is its endpoint in Z^d plus the
// signed areas of the closed path (word path followed by the staircase back to
// the origin) projected onto every coordinate plane.

#include <cstdint>
#include <vector>

#include "fmb/errors.hpp"
#include "fmb/lattice.hpp"
#include "fmb/metabelian.hpp"
#include "fmb/word.hpp"

namespace fmb {

struct NilpotentElement {
  int d = 1;
  LatticePoint endpoint;
  std::vector<std::int64_t> areas;  // d x d row-major, antisymmetric

  static NilpotentElement identity(int d) {
    return {d, LatticePoint::origin(static_cast<std::size_t>(d)), std::vector<std::int64_t>(static_cast<std::size_t>(d * d), 0)};
  }

  // 1-based axes.
  std::int64_t area(int i, int j) const { return areas.at(static_cast<std::size_t>((i - 1) * d + (j - 1))); }

  bool is_identity() const { return *this == identity(d); }
  bool operator==(const NilpotentElement&) const = default;
};

// A_ij = sum over edges (b, j) of b_i * f(b, j); a discrete Green's theorem
// for the oriented area of the (i, j) projection of a closed flow.
inline std::vector<std::int64_t> area_functional(const EdgeFlow& closed, int d) {
  std::vector<std::int64_t> a(static_cast<std::size_t>(d * d), 0);
  for (const auto& [e, m] : closed.entries()) {
    const int j = e.axis;
    for (int i = 1; i <= d; ++i) {
      if (i == j) continue;
      auto& cell = a[static_cast<std::size_t>((i - 1) * d + (j - 1))];
      cell = checked_add(cell, checked_mul(e.base[static_cast<std::size_t>(i - 1)], m));
    }
  }
  return a;
}

inline NilpotentElement nil_eval(const Word& w) {
  const MetabelianElement g = mb_eval(w);
  const EdgeFlow closed = to_extension(g).cycle;
  return {w.d, g.endpoint, area_functional(closed, w.d)};
}

// Projects a metabelian element onto the class-2 quotient.
inline NilpotentElement nil_from_metabelian(const MetabelianElement& g) {
  return {g.d, g.endpoint, area_functional(to_extension(g).cycle, g.d)};
}

// Closed flow of a product is c_a + shift(c_b) + beta(v, w); shifting a cycle
// leaves its areas unchanged, so only the cocycle term is new.
inline NilpotentElement nil_mul(const NilpotentElement& a, const NilpotentElement& b) {
  if (a.d != b.d) throw DimensionMismatch("nil_mul: elements of different rank");
  NilpotentElement r{a.d, a.endpoint + b.endpoint, a.areas};
  const auto corr = area_functional(cocycle_beta(a.endpoint, b.endpoint), a.d);
  for (std::size_t k = 0; k < r.areas.size(); ++k) r.areas[k] = checked_add(checked_add(r.areas[k], b.areas[k]), corr[k]);
  return r;
}

inline NilpotentElement nil_inv(const NilpotentElement& a) {
  const auto corr = area_functional(cocycle_beta(a.endpoint, -a.endpoint), a.d);
  NilpotentElement r{a.d, -a.endpoint, a.areas};
  for (std::size_t k = 0; k < r.areas.size(); ++k) r.areas[k] = checked_neg(checked_add(r.areas[k], corr[k]));
  return r;
}

inline NilpotentElement nil_generator(int d, int letter) { return nil_eval(Word{d, {letter}}); }

}  // namespace fmb
