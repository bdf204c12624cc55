#pragma once

// Uniform interface over the implemented groups so the random-walk lab can
// step, deduplicate and measure elements of any of them.
//
// An engine provides:
//   Element identity() const;
//   void step(Element&, int letter) const;           // right multiplication
//   void key(const Element&, std::string& out) const; // canonical bytes
//   LengthBracket bracket(const Element&, const Word& path, bool exact) const;

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "fmb/errors.hpp"
#include "fmb/geodesic.hpp"
#include "fmb/lamplighter.hpp"
#include "fmb/metabelian.hpp"
#include "fmb/nilpotent.hpp"
#include "fmb/word.hpp"

namespace fmb {

enum class Variety { abelian, free_group, nilpotent2, metabelian, lamplighter };

inline std::string_view to_string(Variety v) {
  switch (v) {
    case Variety::abelian: return "abelian";
    case Variety::free_group: return "free";
    case Variety::nilpotent2: return "nilpotent2";
    case Variety::metabelian: return "metabelian";
    case Variety::lamplighter: return "lamplighter";
  }
  return "?";
}

inline Variety parse_variety(std::string_view s) {
  if (s == "abelian") return Variety::abelian;
  if (s == "free") return Variety::free_group;
  if (s == "nilpotent2") return Variety::nilpotent2;
  if (s == "metabelian") return Variety::metabelian;
  if (s == "lamplighter") return Variety::lamplighter;
  throw Error("unknown variety '" + std::string(s) + "'");
}

// Simple symmetric walk: uniform on the 2 * generators() letters.
struct WalkConfig {
  Variety variety = Variety::metabelian;
  int d = 2;
  LampGroupSpec lamp{};

  int generators() const { return variety == Variety::lamplighter ? d + 1 : d; }
  int alphabet() const { return 2 * generators(); }
};

// Lower and upper bounds on the word length L(g); `exact` when known.
struct LengthBracket {
  std::int64_t lower = 0;
  std::int64_t upper = 0;
  std::optional<std::int64_t> exact;
};

namespace detail {

inline void put_i64(std::string& out, std::int64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

inline void put_point(std::string& out, const LatticePoint& p) {
  for (auto c : p.coords()) put_i64(out, c);
}

inline std::int64_t parity_fix(std::int64_t lower, std::int64_t upper) {
  return (upper - lower) % 2 == 0 ? lower : lower + 1;
}

}  // namespace detail

struct AbelianEngine {
  using Element = LatticePoint;
  int d;

  Element identity() const { return LatticePoint::origin(static_cast<std::size_t>(d)); }
  void step(Element& e, int letter) const { e.step(letter); }
  void key(const Element& e, std::string& out) const { detail::put_point(out, e); }
  LengthBracket bracket(const Element& e, const Word&, bool) const {
    const auto l = e.l1_norm();
    return {l, l, l};
  }
};

// Free group: elements are freely reduced words.
struct FreeEngine {
  using Element = std::vector<int>;
  int d;

  Element identity() const { return {}; }
  void step(Element& e, int letter) const {
    if (!e.empty() && e.back() == -letter) {
      e.pop_back();
    } else {
      e.push_back(letter);
    }
  }
  void key(const Element& e, std::string& out) const {
    for (int l : e) out.push_back(static_cast<char>(l));
  }
  LengthBracket bracket(const Element& e, const Word&, bool) const {
    const auto l = static_cast<std::int64_t>(e.size());
    return {l, l, l};
  }
};

struct NilpotentEngine {
  using Element = NilpotentElement;
  int d;

  Element identity() const { return NilpotentElement::identity(d); }
  void step(Element& e, int letter) const { e = nil_mul(e, nil_generator(d, letter)); }
  void key(const Element& e, std::string& out) const {
    detail::put_point(out, e.endpoint);
    for (int i = 1; i <= d; ++i)
      for (int j = i + 1; j <= d; ++j) detail::put_i64(out, e.area(i, j));
  }
  LengthBracket bracket(const Element& e, const Word& path, bool) const {
    const auto upper = static_cast<std::int64_t>(free_reduce(path).length());
    const auto lower = detail::parity_fix(e.endpoint.l1_norm(), upper);
    return {lower, upper, lower == upper ? std::optional<std::int64_t>(lower) : std::nullopt};
  }
};

struct MetabelianEngine {
  using Element = MetabelianElement;
  int d;
  // Exact geodesic search is attempted only up to this length.
  std::int64_t exact_budget = 8;

  Element identity() const { return MetabelianElement::identity(d); }
  void step(Element& e, int letter) const { e.step(letter); }
  void key(const Element& e, std::string& out) const {
    detail::put_point(out, e.endpoint);
    for (const auto& [edge, m] : e.flow.entries()) {
      detail::put_point(out, edge.base);
      out.push_back(static_cast<char>(edge.axis));
      detail::put_i64(out, m);
    }
  }
  LengthBracket bracket(const Element& e, const Word& path, bool exact) const {
    LengthBracket b{length_lower_bound(e), static_cast<std::int64_t>(min_word_upper(e).length()), std::nullopt};
    if (exact) {
      const auto budget = std::min<std::int64_t>(exact_budget, static_cast<std::int64_t>(free_reduce(path).length()));
      if (auto w = min_word_exact(e, budget)) b.exact = static_cast<std::int64_t>(w->length());
    }
    return b;
  }
};

struct LamplighterEngine {
  using Element = LamplighterElement;
  int d;
  LampGroupSpec spec;

  Element identity() const { return LamplighterElement::identity(d, spec); }
  void step(Element& e, int letter) const { e.step(letter); }
  void key(const Element& e, std::string& out) const {
    detail::put_point(out, e.position);
    for (const auto& [u, v] : e.lamps) {
      detail::put_point(out, u);
      detail::put_i64(out, v);
    }
  }
  LengthBracket bracket(const Element& e, const Word& path, bool) const {
    std::int64_t lamp_letters = 0;
    for (const auto& [u, v] : e.lamps) lamp_letters = checked_add(lamp_letters, spec.letter_cost(v));
    const auto upper = static_cast<std::int64_t>(free_reduce(path).length());
    const auto lower = std::min(upper, checked_add(lamp_letters, e.position.l1_norm()));
    return {lower, upper, lower == upper ? std::optional<std::int64_t>(lower) : std::nullopt};
  }
};

// Calls f(engine) with the engine matching the configuration.
template <class F>
decltype(auto) with_engine(const WalkConfig& cfg, F&& f) {
  if (cfg.d < 1) throw RangeError("walk dimension must be >= 1");
  switch (cfg.variety) {
    case Variety::abelian: return f(AbelianEngine{cfg.d});
    case Variety::free_group: return f(FreeEngine{cfg.d});
    case Variety::nilpotent2: return f(NilpotentEngine{cfg.d});
    case Variety::metabelian: return f(MetabelianEngine{cfg.d});
    case Variety::lamplighter: return f(LamplighterEngine{cfg.d, cfg.lamp});
  }
  throw Error("unknown variety");
}

}  // namespace fmb
