#pragma once

// Lamplighter groups Z^d wr H for cyclic H, and their presentation as a
// quotient of the free metabelian group on d+1 generators.

#include <cstdint>
#include <cstdlib>
#include <map>

#include "fmb/errors.hpp"
#include "fmb/lattice.hpp"
#include "fmb/metabelian.hpp"
#include "fmb/word.hpp"

namespace fmb {

// m == 0 is H = Z, m >= 2 is H = Z/m.
struct LampGroupSpec {
  std::int64_t m = 0;

  LampGroupSpec() = default;
  explicit LampGroupSpec(std::int64_t modulus) : m(modulus) {
    if (m == 1 || m < 0) throw RangeError("lamp group modulus must be 0 or >= 2");
  }

  std::int64_t reduce(std::int64_t v) const {
    if (m == 0) return v;
    const std::int64_t r = v % m;
    return r < 0 ? r + m : r;
  }

  // Number of lamp letters needed to reach value v from 0.
  std::int64_t letter_cost(std::int64_t v) const {
    if (m == 0) return v < 0 ? -v : v;
    const std::int64_t r = reduce(v);
    return r < m - r ? r : m - r;
  }

  bool operator==(const LampGroupSpec&) const = default;
};

struct LamplighterElement {
  int d = 1;
  LampGroupSpec spec;
  LatticePoint position;
  VertexMap lamps;  // no zero values; residues in [0, m) when m >= 2

  static LamplighterElement identity(int d, LampGroupSpec spec) {
    return {d, spec, LatticePoint::origin(static_cast<std::size_t>(d)), {}};
  }

  void add_lamp(const LatticePoint& u, std::int64_t v) {
    auto it = lamps.find(u);
    const std::int64_t cur = it == lamps.end() ? 0 : it->second;
    const std::int64_t next = spec.reduce(checked_add(cur, v));
    if (next == 0) {
      if (it != lamps.end()) lamps.erase(it);
    } else if (it == lamps.end()) {
      lamps.emplace(u, next);
    } else {
      it->second = next;
    }
  }

  // Right multiplication by a letter of the (d+1)-letter alphabet; letter
  // +-(d+1) toggles the lamp under the lamplighter.
  void step(int letter) {
    const int axis = std::abs(letter);
    if (axis < 1 || axis > d + 1) throw RangeError("letter out of range");
    if (axis == d + 1) {
      add_lamp(position, letter > 0 ? 1 : -1);
    } else {
      position.step(letter);
    }
  }

  bool is_identity() const { return position.is_zero() && lamps.empty(); }
  bool operator==(const LamplighterElement&) const = default;
};

// `w` is a word over d+1 letters; the last one is the lamp generator.
inline LamplighterElement ll_eval(const Word& w, LampGroupSpec spec) {
  if (w.d < 2) throw RangeError("ll_eval: alphabet needs at least one move letter and the lamp letter");
  auto g = LamplighterElement::identity(w.d - 1, spec);
  for (int l : w.letters) g.step(l);
  return g;
}

inline LamplighterElement ll_mul(const LamplighterElement& a, const LamplighterElement& b) {
  if (a.d != b.d || a.spec != b.spec) throw DimensionMismatch("ll_mul: incompatible lamplighter elements");
  LamplighterElement r = a;
  for (const auto& [u, v] : b.lamps) r.add_lamp(u + a.position, v);
  r.position += b.position;
  return r;
}

inline LamplighterElement ll_inv(const LamplighterElement& a) {
  LamplighterElement r = LamplighterElement::identity(a.d, a.spec);
  r.position = -a.position;
  for (const auto& [u, v] : a.lamps) r.add_lamp(u - a.position, checked_neg(v));
  return r;
}

// Sums the flow on edges parallel to the last axis over each column above a
// node of Z^d; that column sum is the lamp value at the node.
inline LamplighterElement ll_project(const MetabelianElement& g, LampGroupSpec spec) {
  if (g.d < 2) throw RangeError("ll_project: need rank >= 2");
  const int d = g.d - 1;
  auto r = LamplighterElement::identity(d, spec);
  std::vector<std::int64_t> pos(g.endpoint.coords().begin(), g.endpoint.coords().end() - 1);
  r.position = LatticePoint(std::move(pos));
  for (const auto& [e, m] : g.flow.entries()) {
    if (e.axis != g.d) continue;
    std::vector<std::int64_t> node(e.base.coords().begin(), e.base.coords().end() - 1);
    r.add_lamp(LatticePoint(std::move(node)), m);
  }
  return r;
}

}  // namespace fmb
