#pragma once

// Words over d generators: parsing, canonical spelling, free reduction and
// the word -> lattice path dictionary.

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "fmb/errors.hpp"
#include "fmb/lattice.hpp"

namespace fmb {

struct Word {
  int d = 1;
  std::vector<int> letters;  // +i = x_i, -i = x_i^{-1}

  std::size_t length() const { return letters.size(); }
  bool empty() const { return letters.empty(); }

  bool operator==(const Word&) const = default;
};

struct ParseOptions {
  // Accept 'a'/'A' as an alias for the last generator x_d (the lamp letter of
  // a lamplighter alphabet).
  bool lamp_alias = false;
  // Guard against "x1^999999999" style inputs.
  std::size_t max_letters = 50'000'000;
};

namespace detail {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace detail

inline Word parse_word(std::string_view text, int d, ParseOptions opts = {}) {
  if (d < 1) throw RangeError("word dimension must be >= 1");
  Word w{d, {}};
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (detail::is_space(text[i])) {
      ++i;
      continue;
    }
    const std::size_t token_start = i;
    const char c = text[i];
    int index = 0;
    bool inverse = false;
    if (c == 'x' || c == 'X') {
      inverse = c == 'X';
      ++i;
      if (i >= n || !detail::is_digit(text[i])) throw SyntaxError("expected generator index", i);
      std::int64_t idx = 0;
      const std::size_t digits_start = i;
      while (i < n && detail::is_digit(text[i])) {
        idx = idx * 10 + (text[i] - '0');
        if (idx > std::numeric_limits<int>::max()) throw RangeError("generator index out of range at offset " + std::to_string(digits_start));
        ++i;
      }
      if (idx < 1 || idx > d)
        throw RangeError("generator index " + std::to_string(idx) + " out of range 1.." + std::to_string(d) + " at offset " +
                         std::to_string(digits_start));
      index = static_cast<int>(idx);
    } else if (opts.lamp_alias && (c == 'a' || c == 'A')) {
      inverse = c == 'A';
      index = d;
      ++i;
    } else {
      throw SyntaxError(std::string("unexpected character '") + c + "'", i);
    }

    std::int64_t exponent = 1;
    if (i < n && text[i] == '^') {
      ++i;
      const std::size_t exp_start = i;
      bool negative = false;
      if (i < n && (text[i] == '-' || text[i] == '+')) {
        negative = text[i] == '-';
        ++i;
      }
      if (i >= n || !detail::is_digit(text[i])) throw SyntaxError("expected exponent", i);
      std::int64_t k = 0;
      while (i < n && detail::is_digit(text[i])) {
        k = k * 10 + (text[i] - '0');
        if (k > static_cast<std::int64_t>(opts.max_letters)) throw SyntaxError("exponent too large", exp_start);
        ++i;
      }
      if (k == 0) throw SyntaxError("exponent must be nonzero", exp_start);
      exponent = negative ? -k : k;
    }
    // A token must end at whitespace, end of input, or the start of the next letter.
    if (i < n && !detail::is_space(text[i]) && text[i] != 'x' && text[i] != 'X' &&
        !(opts.lamp_alias && (text[i] == 'a' || text[i] == 'A')))
      throw SyntaxError("malformed token", i);

    if (w.letters.size() + static_cast<std::size_t>(std::abs(exponent)) > opts.max_letters)
      throw SyntaxError("word too long", token_start);
    int letter = inverse ? -index : index;
    if (exponent < 0) letter = -letter;
    w.letters.insert(w.letters.end(), static_cast<std::size_t>(std::abs(exponent)), letter);
  }
  return w;
}

// Canonical spelling: maximal runs of one letter written "xi^k" (k != 0,
// negative for inverse runs), "^1" omitted, tokens separated by one space.
inline std::string format_word(const Word& w) {
  std::string out;
  std::size_t i = 0;
  while (i < w.letters.size()) {
    const int l = w.letters[i];
    std::size_t j = i;
    while (j < w.letters.size() && w.letters[j] == l) ++j;
    const std::size_t run = j - i;
    if (!out.empty()) out += ' ';
    out += 'x';
    out += std::to_string(std::abs(l));
    if (l < 0) {
      out += "^-" + std::to_string(run);
    } else if (run != 1) {
      out += '^' + std::to_string(run);
    }
    i = j;
  }
  return out;
}

inline Word free_reduce(const Word& w) {
  Word r{w.d, {}};
  r.letters.reserve(w.letters.size());
  for (int l : w.letters) {
    if (!r.letters.empty() && r.letters.back() == -l) {
      r.letters.pop_back();
    } else {
      r.letters.push_back(l);
    }
  }
  return r;
}

inline Word inverse(const Word& w) {
  Word r{w.d, {}};
  r.letters.assign(w.letters.rbegin(), w.letters.rend());
  for (int& l : r.letters) l = -l;
  return r;
}

inline Word concat(const Word& a, const Word& b) {
  if (a.d != b.d) throw DimensionMismatch("words over different alphabets");
  Word r = a;
  r.letters.insert(r.letters.end(), b.letters.begin(), b.letters.end());
  return r;
}

// Commutator [a, b] = a b a^{-1} b^{-1}.
inline Word commutator(const Word& a, const Word& b) { return concat(concat(a, b), concat(inverse(a), inverse(b))); }

inline LatticePath word_to_path(const Word& w) {
  return LatticePath{LatticePoint::origin(static_cast<std::size_t>(w.d)), w.letters};
}

// Image in Z^d (letter sums).
inline LatticePoint abelianize(const Word& w) {
  std::vector<std::int64_t> c(static_cast<std::size_t>(w.d), 0);
  for (int l : w.letters) c[static_cast<std::size_t>(std::abs(l) - 1)] += l > 0 ? 1 : -1;
  return LatticePoint(std::move(c));
}

}  // namespace fmb
