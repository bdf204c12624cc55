#include <gtest/gtest.h>

#include <random>

#include "fmb/geodesic.hpp"
#include "support.hpp"

using namespace fmb;

namespace {

MetabelianElement two_plackets() {
  return MetabelianElement{2, {0, 0}, placket(1, 2, {0, 0}) + placket(1, 2, {2, 0})};
}

MetabelianElement placket_element() { return MetabelianElement{2, {0, 0}, placket(1, 2, {0, 0})}; }

}  // namespace

TEST(LowerBound, Examples) {
  EXPECT_EQ(length_lower_bound(placket_element()), 4);
  EXPECT_EQ(length_lower_bound(mb_eval(parse_word("x1", 2))), 1);
  EXPECT_EQ(length_lower_bound(two_plackets()), 8);
  EXPECT_EQ(length_lower_bound(MetabelianElement::identity(3)), 0);
}

TEST(MinWordExact, Identity) {
  const auto w = min_word_exact(MetabelianElement::identity(2), 0);
  ASSERT_TRUE(w.has_value());
  EXPECT_TRUE(w->letters.empty());
}

TEST(MinWordExact, Placket) {
  const auto w = min_word_exact(placket_element(), 4);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->length(), 4u);
  EXPECT_EQ(mb_eval(*w), placket_element());
  EXPECT_EQ(format_word(*w), "x1 x2 x1^-1 x2^-1");
}

TEST(MinWordExact, TwoSeparatedPlackets) {
  const auto g = two_plackets();
  EXPECT_FALSE(min_word_exact(g, 9).has_value());
  const auto w = min_word_exact(g, 10);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->length(), 10u);
  EXPECT_EQ(mb_eval(*w), g);
}

TEST(MinWordExact, BudgetBelowLowerBoundSignals) { EXPECT_FALSE(min_word_exact(placket_element(), 3).has_value()); }

TEST(MinWordExact, LexicographicallyLeast) {
  // Among the 4-letter words for the placket, the search returns the least in
  // the order +1 < -1 < +2 < -2.
  const auto order = letter_order(2);
  auto rank = [&](int l) { return std::find(order.begin(), order.end(), l) - order.begin(); };
  std::vector<int> best;
  Word w{2, {0, 0, 0, 0}};
  for (int a : order)
    for (int b : order)
      for (int c : order)
        for (int e : order) {
          w.letters = {a, b, c, e};
          if (mb_eval(w) != placket_element()) continue;
          if (best.empty() || std::lexicographical_compare(w.letters.begin(), w.letters.end(), best.begin(), best.end(),
                                                           [&](int x, int y) { return rank(x) < rank(y); }))
            best = w.letters;
        }
  EXPECT_EQ(min_word_exact(placket_element(), 4)->letters, best);
}

TEST(MinWordUpper, Examples) {
  EXPECT_EQ(min_word_upper(placket_element()).length(), 4u);
  EXPECT_TRUE(min_word_upper(MetabelianElement::identity(3)).letters.empty());
  const auto w = min_word_upper(two_plackets());
  EXPECT_GE(w.length(), 10u);
  EXPECT_EQ(mb_eval(w), two_plackets());
}

TEST(MinWordUpper, SoundOnRandomLongWords) {
  std::mt19937_64 rng(1);
  for (int d : {2, 3, 4})
    for (int k = 0; k < 200; ++k) {
      const auto g = mb_eval(fixtures::random_word(rng, d, 300));
      const Word w = min_word_upper(g);
      ASSERT_EQ(mb_eval(w), g);
      ASSERT_GE(static_cast<std::int64_t>(w.length()), length_lower_bound(g));
      ASSERT_EQ((w.length() - static_cast<std::size_t>(length_lower_bound(g))) % 2, 0u);
    }
}

TEST(Geodesic, SandwichAndGeneratorConsistency) {
  std::mt19937_64 rng(2);
  for (int d : {2, 3})
    for (int k = 0; k < 150; ++k) {
      const Word src = fixtures::random_word(rng, d, 10);
      const auto g = mb_eval(src);
      const auto exact = min_word_exact(g, 10);
      ASSERT_TRUE(exact.has_value());
      const auto lo = length_lower_bound(g);
      const auto ex = static_cast<std::int64_t>(exact->length());
      const auto up = static_cast<std::int64_t>(min_word_upper(g).length());
      ASSERT_EQ(mb_eval(*exact), g);
      ASSERT_LE(lo, ex);
      ASSERT_LE(ex, up);
      ASSERT_EQ((ex - lo) % 2, 0);
      ASSERT_EQ((up - ex) % 2, 0);
      ASSERT_LE(ex, static_cast<std::int64_t>(free_reduce(src).length()));
    }
}

TEST(Geodesic, MatchesNaiveEnumeration) {
  for (int d : {2, 3}) {
    const int L = d == 2 ? 8 : 6;
    const auto table = fixtures::oracle::enumerate_min_lengths(d, L);
    std::mt19937_64 rng(static_cast<std::uint64_t>(40 + d));
    for (int k = 0; k < 100; ++k) {
      const auto g = mb_eval(fixtures::random_word(rng, d, static_cast<std::size_t>(L)));
      const auto exact = min_word_exact(g, L);
      ASSERT_TRUE(exact.has_value());
      ASSERT_EQ(static_cast<int>(exact->length()), table.at(fixtures::oracle::metabelian_key(g)));
    }
  }
}

TEST(Geodesic, LengthBounds) {
  const auto b = length_bounds(two_plackets());
  EXPECT_EQ(b.lower, 8);
  EXPECT_GE(b.upper, 10);
  EXPECT_EQ(mb_eval(b.witness), two_plackets());
}
