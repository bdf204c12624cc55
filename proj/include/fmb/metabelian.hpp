#pragma once

// The free metabelian group on d generators as pairs (endpoint, edge flow).
// Two words give the same element exactly when their lattice paths end at the
// same point and traverse every edge the same signed number of times.

#include <cstdint>
#include <cstdlib>

#include "fmb/errors.hpp"
#include "fmb/lattice.hpp"
#include "fmb/word.hpp"

namespace fmb {

struct MetabelianElement {
  int d = 1;
  LatticePoint endpoint;
  EdgeFlow flow;

  static MetabelianElement identity(int d) { return {d, LatticePoint::origin(static_cast<std::size_t>(d)), {}}; }

  bool is_identity() const { return endpoint.is_zero() && flow.empty(); }
  // Elements of the commutant have closed paths.
  bool in_commutant() const { return endpoint.is_zero(); }

  // Right multiplication by one generator letter.
  void step(int letter) {
    const int axis = std::abs(letter);
    if (axis < 1 || axis > d) throw RangeError("letter out of range");
    if (letter > 0) {
      flow.add(Edge{endpoint, axis}, 1);
      endpoint.step(letter);
    } else {
      endpoint.step(letter);
      flow.add(Edge{endpoint, axis}, -1);
    }
  }

  bool operator==(const MetabelianElement&) const = default;
};

inline MetabelianElement mb_eval(const Word& w) {
  const LatticePath p = word_to_path(w);
  return {w.d, p.end(), flow_of_path(p)};
}

inline MetabelianElement mb_mul(const MetabelianElement& a, const MetabelianElement& b) {
  if (a.d != b.d) throw DimensionMismatch("mb_mul: elements of different rank");
  return {a.d, a.endpoint + b.endpoint, a.flow + translate_flow(b.flow, a.endpoint)};
}

inline MetabelianElement mb_inv(const MetabelianElement& a) {
  const LatticePoint back = -a.endpoint;
  return {a.d, back, -translate_flow(a.flow, back)};
}

// Boundary of the unit square with nodes (b, b+e_i, b+e_i+e_j, b+e_j) in
// that order.
inline EdgeFlow placket(int i, int j, const LatticePoint& base) {
  const int d = static_cast<int>(base.dim());
  if (i == j) throw RangeError("placket: axes must differ");
  if (i < 1 || i > d || j < 1 || j > d) throw RangeError("placket: axis out of range");
  const auto ei = LatticePoint::unit(base.dim(), i);
  const auto ej = LatticePoint::unit(base.dim(), j);
  EdgeFlow f;
  f.add(Edge{base, i}, 1);
  f.add(Edge{base + ei, j}, 1);
  f.add(Edge{base + ej, i}, -1);
  f.add(Edge{base, j}, -1);
  return f;
}

// The cycle tau_v, then v + tau_w, then tau_{v+w} backwards.
inline EdgeFlow cocycle_beta(const LatticePoint& v, const LatticePoint& w, PathSystem ps = {}) {
  if (v.dim() != w.dim()) throw DimensionMismatch("cocycle_beta: dimension mismatch");
  EdgeFlow c = flow_of_path(canonical_path(v, ps));
  c += translate_flow(flow_of_path(canonical_path(w, ps)), v);
  c -= flow_of_path(canonical_path(v + w, ps));
  return c;
}

// Element of the extension of the cycle group by Z^d: a cycle and a shift.
struct ExtensionElement {
  EdgeFlow cycle;
  LatticePoint shift;

  bool operator==(const ExtensionElement&) const = default;
};

inline ExtensionElement extension_mul(const ExtensionElement& p, const ExtensionElement& q, PathSystem ps = {}) {
  if (p.shift.dim() != q.shift.dim()) throw DimensionMismatch("extension_mul: dimension mismatch");
  if (!is_cycle(p.cycle) || !is_cycle(q.cycle)) throw Error("extension_mul: cycle component has nonzero divergence");
  EdgeFlow c = p.cycle + translate_flow(q.cycle, p.shift);
  c += cocycle_beta(p.shift, q.shift, ps);
  return {std::move(c), p.shift + q.shift};
}

// g -> (flow(g) - flow(tau_endpoint), endpoint).
inline ExtensionElement to_extension(const MetabelianElement& g, PathSystem ps = {}) {
  return {g.flow - flow_of_path(canonical_path(g.endpoint, ps)), g.endpoint};
}

inline MetabelianElement from_extension(const ExtensionElement& x, PathSystem ps = {}) {
  return {static_cast<int>(x.shift.dim()), x.shift, x.cycle + flow_of_path(canonical_path(x.shift, ps))};
}

}  // namespace fmb
