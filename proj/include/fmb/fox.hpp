#pragma once

// Abelianized Fox derivatives of a word, i.e. its image under the Magnus
// embedding into the wreath product Z^d wr Z^d. Table i is the Laurent
// polynomial d(w)/d(x_i) with exponents in Z^d.
//
// Computed from the product rule only; nothing here walks lattice paths, so
// the result is an independent check on flow_of_path.

#include <cstdint>
#include <cstdlib>
#include <map>
#include <span>
#include <vector>

#include "fmb/errors.hpp"
#include "fmb/lattice.hpp"
#include "fmb/word.hpp"

namespace fmb {

using LaurentPoly = std::map<std::vector<std::int64_t>, std::int64_t>;

struct LaurentTable {
  int d = 1;
  std::vector<LaurentPoly> tables;  // tables[i - 1] = d(w)/d(x_i), abelianized

  bool operator==(const LaurentTable&) const = default;
};

namespace detail {

struct FoxValue {
  std::vector<std::int64_t> exponent;  // abelianization of the subword
  std::vector<LaurentPoly> derivative;
};

inline void poly_add_shifted(LaurentPoly& acc, const LaurentPoly& term, const std::vector<std::int64_t>& shift) {
  for (const auto& [mono, coef] : term) {
    std::vector<std::int64_t> key(mono.size());
    for (std::size_t k = 0; k < mono.size(); ++k) key[k] = checked_add(mono[k], shift[k]);
    auto [it, inserted] = acc.try_emplace(std::move(key), coef);
    if (!inserted) {
      it->second = checked_add(it->second, coef);
      if (it->second == 0) acc.erase(it);
    }
  }
}

inline FoxValue fox_letter(int letter, int d) {
  FoxValue v{std::vector<std::int64_t>(static_cast<std::size_t>(d), 0), std::vector<LaurentPoly>(static_cast<std::size_t>(d))};
  const auto j = static_cast<std::size_t>(std::abs(letter) - 1);
  if (letter > 0) {
    // d(x_j)/d(x_j) = 1
    v.exponent[j] = 1;
    v.derivative[j][std::vector<std::int64_t>(static_cast<std::size_t>(d), 0)] = 1;
  } else {
    // d(x_j^{-1})/d(x_j) = -x_j^{-1}
    v.exponent[j] = -1;
    std::vector<std::int64_t> mono(static_cast<std::size_t>(d), 0);
    mono[j] = -1;
    v.derivative[j][mono] = -1;
  }
  return v;
}

// d(uv) = d(u) + ab(u) * d(v), applied to halves of the word.
inline FoxValue fox_recursive(std::span<const int> letters, int d) {
  if (letters.empty())
    return {std::vector<std::int64_t>(static_cast<std::size_t>(d), 0), std::vector<LaurentPoly>(static_cast<std::size_t>(d))};
  if (letters.size() == 1) return fox_letter(letters[0], d);
  const std::size_t mid = letters.size() / 2;
  FoxValue left = fox_recursive(letters.first(mid), d);
  const FoxValue right = fox_recursive(letters.subspan(mid), d);
  for (std::size_t i = 0; i < left.derivative.size(); ++i) poly_add_shifted(left.derivative[i], right.derivative[i], left.exponent);
  for (std::size_t k = 0; k < left.exponent.size(); ++k) left.exponent[k] = checked_add(left.exponent[k], right.exponent[k]);
  return left;
}

}  // namespace detail

inline LaurentTable fox_flow_oracle(const Word& w) {
  for (int l : w.letters)
    if (l == 0 || std::abs(l) > w.d) throw RangeError("fox_flow_oracle: letter out of range");
  auto v = detail::fox_recursive(std::span<const int>(w.letters), w.d);
  return {w.d, std::move(v.derivative)};
}

// Regroups an edge flow by axis: table i at u is the multiplicity of edge (u, i).
inline LaurentTable laurent_from_flow(const EdgeFlow& f, int d) {
  LaurentTable t{d, std::vector<LaurentPoly>(static_cast<std::size_t>(d))};
  for (const auto& [e, m] : f.entries()) t.tables.at(static_cast<std::size_t>(e.axis - 1))[e.base.coords()] = m;
  return t;
}

inline EdgeFlow flow_from_laurent(const LaurentTable& t) {
  EdgeFlow f;
  for (std::size_t i = 0; i < t.tables.size(); ++i)
    for (const auto& [mono, coef] : t.tables[i]) f.add(Edge{LatticePoint(mono), static_cast<int>(i + 1)}, coef);
  return f;
}

}  // namespace fmb
