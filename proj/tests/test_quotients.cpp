#include <gtest/gtest.h>

#include <random>

#include "fmb/lamplighter.hpp"
#include "fmb/nilpotent.hpp"
#include "support.hpp"

using namespace fmb;

namespace {

NilpotentElement nil(const char* text, int d) { return nil_eval(parse_word(text, d)); }

Word lamp_word(const char* text, int d) {
  ParseOptions o;
  o.lamp_alias = true;
  return parse_word(text, d + 1, o);
}

// Shoelace area of the (i, j) projection of a closed word, computed on
// vertices (independent of the flow functional).
std::int64_t shoelace(const Word& w, int i, int j) {
  const auto vs = word_to_path(w).vertices();
  std::int64_t twice = 0;
  for (std::size_t k = 0; k + 1 < vs.size(); ++k) {
    const auto& a = vs[k];
    const auto& b = vs[k + 1];
    twice += a[static_cast<std::size_t>(i - 1)] * b[static_cast<std::size_t>(j - 1)] -
             b[static_cast<std::size_t>(i - 1)] * a[static_cast<std::size_t>(j - 1)];
  }
  return twice / 2;
}

}  // namespace

TEST(Nilpotent, HeisenbergCommutator) {
  const auto g = nil("x1x2X1X2", 2);
  EXPECT_TRUE(g.endpoint.is_zero());
  EXPECT_EQ(g.area(1, 2), 1);
  EXPECT_EQ(g.area(2, 1), -1);
}

TEST(Nilpotent, TwoByTwoLoop) { EXPECT_EQ(nil("x1^2 x2^2 X1^2 X2^2", 2).area(1, 2), 4); }

TEST(Nilpotent, ProjectionCriterion) {
  const auto g = nil("x1x3X1X3", 3);
  EXPECT_EQ(g.area(1, 3), 1);
  EXPECT_EQ(g.area(1, 2), 0);
  EXPECT_EQ(g.area(2, 3), 0);
}

TEST(Nilpotent, Antisymmetric) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 300; ++k) {
    const auto g = nil_eval(fixtures::random_word(rng, 4, 30));
    for (int i = 1; i <= 4; ++i) {
      EXPECT_EQ(g.area(i, i), 0);
      for (int j = 1; j <= 4; ++j) EXPECT_EQ(g.area(i, j), -g.area(j, i));
    }
  }
}

TEST(Nilpotent, AreasMatchShoelaceOnClosedWords) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 1000; ++k) {
    const Word w = fixtures::random_closed_word(rng, 3, 30);
    const auto g = nil_eval(w);
    ASSERT_TRUE(g.endpoint.is_zero());
    bool all_zero = true;
    for (int i = 1; i <= 3; ++i)
      for (int j = i + 1; j <= 3; ++j) {
        ASSERT_EQ(g.area(i, j), shoelace(w, i, j));
        all_zero = all_zero && g.area(i, j) == 0;
      }
    EXPECT_EQ(g.is_identity(), all_zero);
  }
}

TEST(Nilpotent, Homomorphism) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 1000; ++k) {
    const Word u = fixtures::random_word(rng, 3, 25), v = fixtures::random_word(rng, 3, 25);
    ASSERT_EQ(nil_mul(nil_eval(u), nil_eval(v)), nil_eval(concat(u, v)));
    ASSERT_TRUE(nil_mul(nil_eval(u), nil_inv(nil_eval(u))).is_identity());
  }
}

TEST(Nilpotent, CommutatorsAreCentral) {
  std::mt19937_64 rng(4);
  const auto c = nil("x1x2X1X2", 3);
  for (int k = 0; k < 200; ++k) {
    const auto g = nil_eval(fixtures::random_word(rng, 3, 20));
    EXPECT_EQ(nil_mul(c, g), nil_mul(g, c));
  }
}

TEST(Nilpotent, PowerCommutators) {
  for (int m = 1; m <= 4; ++m)
    for (int n = 1; n <= 4; ++n) {
      const std::string w = "x1^" + std::to_string(m) + " x2^" + std::to_string(n) + " X1^" + std::to_string(m) + " X2^" + std::to_string(n);
      EXPECT_EQ(nil(w.c_str(), 2).area(1, 2), m * n);
    }
}

TEST(Nilpotent, FactorsThroughMetabelian) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 1000; ++k) {
    const Word u = fixtures::random_word(rng, 3, 8), v = fixtures::random_word(rng, 3, 8);
    const Word p = commutator(fixtures::random_word(rng, 3, 4, 1), fixtures::random_word(rng, 3, 4, 1));
    const Word q = commutator(fixtures::random_word(rng, 3, 4, 1), fixtures::random_word(rng, 3, 4, 1));
    const Word a = concat(concat(u, concat(p, q)), v), b = concat(concat(u, concat(q, p)), v);
    ASSERT_EQ(mb_eval(a), mb_eval(b));
    ASSERT_EQ(nil_eval(a), nil_eval(b));
    ASSERT_EQ(nil_from_metabelian(mb_eval(a)), nil_eval(a));
  }
}

TEST(Nilpotent, DimensionMismatch) { EXPECT_THROW(nil_mul(nil("x1", 2), nil("x1", 3)), DimensionMismatch); }

TEST(LampGroupSpec, RejectsTrivialGroup) {
  EXPECT_THROW(LampGroupSpec(1), RangeError);
  EXPECT_THROW(LampGroupSpec(-3), RangeError);
  EXPECT_NO_THROW(LampGroupSpec(0));
}

TEST(Lamplighter, Examples) {
  const LampGroupSpec z2(2), z(0);
  const auto a = ll_eval(lamp_word("a", 2), z2);
  EXPECT_TRUE(a.position.is_zero());
  EXPECT_EQ(a.lamps, (VertexMap{{LatticePoint({0, 0}), 1}}));
  EXPECT_EQ(ll_eval(lamp_word("x1 a X1", 2), z2).lamps, (VertexMap{{LatticePoint({1, 0}), 1}}));
  EXPECT_TRUE(ll_eval(lamp_word("a a", 2), z2).is_identity());
  EXPECT_FALSE(ll_eval(lamp_word("a a", 2), z).is_identity());
  EXPECT_EQ(ll_eval(lamp_word("A", 1), LampGroupSpec(3)).lamps, (VertexMap{{LatticePoint({0}), 2}}));
}

TEST(Lamplighter, ProjectionExamples) {
  const LampGroupSpec z(0);
  EXPECT_TRUE(ll_project(MetabelianElement::identity(3), z).is_identity());
  const auto g = ll_project(mb_eval(lamp_word("x1 a X1 A", 1)), z);
  EXPECT_TRUE(g.position.is_zero());
  EXPECT_EQ(g.lamps, (VertexMap{{LatticePoint({1}), 1}, {LatticePoint({0}), -1}}));
}

TEST(Lamplighter, ProjectionMatchesDirectEvaluation) {
  std::mt19937_64 rng(6);
  for (int d : {2, 3})
    for (std::int64_t m : {0, 2, 3}) {
      const LampGroupSpec spec(m);
      for (int k = 0; k < 500; ++k) {
        const Word w = fixtures::random_word(rng, d + 1, 50);
        ASSERT_EQ(ll_project(mb_eval(w), spec), ll_eval(w, spec));
      }
    }
}

TEST(Lamplighter, Homomorphism) {
  std::mt19937_64 rng(7);
  for (std::int64_t m : {0, 2, 5}) {
    const LampGroupSpec spec(m);
    for (int k = 0; k < 1000 / 3 + 1; ++k) {
      const Word u = fixtures::random_word(rng, 3, 30), v = fixtures::random_word(rng, 3, 30);
      ASSERT_EQ(ll_mul(ll_eval(u, spec), ll_eval(v, spec)), ll_eval(concat(u, v), spec));
      ASSERT_TRUE(ll_mul(ll_eval(u, spec), ll_inv(ll_eval(u, spec))).is_identity());
    }
  }
}

TEST(Lamplighter, KernelRelators) {
  // lamps at different nodes commute: [a, t a t^-1] for any move word t
  std::mt19937_64 rng(8);
  for (int k = 0; k < 300; ++k) {
    const Word t = fixtures::random_word(rng, 2, 10);
    Word tt{3, t.letters};
    const Word a{3, {3}};
    const Word conj = concat(concat(tt, a), inverse(tt));
    EXPECT_TRUE(ll_eval(commutator(a, conj), LampGroupSpec(0)).is_identity());
    EXPECT_TRUE(ll_eval(commutator(a, conj), LampGroupSpec(2)).is_identity());
  }
  // a^m is trivial in Z_m
  EXPECT_TRUE(ll_eval(Word{3, {3, 3, 3}}, LampGroupSpec(3)).is_identity());
}
