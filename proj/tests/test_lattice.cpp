#include <gtest/gtest.h>

#include <random>

#include "fmb/lattice.hpp"
#include "fmb/metabelian.hpp"
#include "fmb/word.hpp"
#include "support.hpp"

using namespace fmb;

namespace {

EdgeFlow flow_of(const char* text, int d) { return flow_of_path(word_to_path(parse_word(text, d))); }

}  // namespace

TEST(CanonicalPath, OriginIsEmpty) {
  const auto p = canonical_path({0, 0});
  EXPECT_TRUE(p.steps.empty());
  EXPECT_EQ(p.end(), LatticePoint({0, 0}));
}

TEST(CanonicalPath, AxisOrderStaircase) {
  EXPECT_EQ(canonical_path({2, 1}).steps, (std::vector<int>{1, 1, 2}));
  EXPECT_EQ(canonical_path({-1, 0, 3}).steps, (std::vector<int>{-1, 3, 3, 3}));
}

TEST(CanonicalPath, ReverseAxisOrder) {
  const PathSystem rev{PathRule::reverse_axis_order};
  EXPECT_EQ(canonical_path({2, 1}, rev).steps, (std::vector<int>{2, 1, 1}));
  EXPECT_EQ(canonical_path({-1, 0, 3}, rev).steps, (std::vector<int>{3, 3, 3, -1}));
}

TEST(CanonicalPath, EndsAtTargetWithL1Length) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const auto v = fixtures::random_point(rng, 3, -6, 6);
    for (auto rule : {PathRule::axis_order, PathRule::reverse_axis_order}) {
      const auto p = canonical_path(v, PathSystem{rule});
      EXPECT_EQ(p.end(), v);
      EXPECT_EQ(static_cast<std::int64_t>(p.steps.size()), v.l1_norm());
    }
  }
}

TEST(FlowOfPath, BackAndForthCancels) { EXPECT_TRUE(flow_of("x1 X1", 2).empty()); }

TEST(FlowOfPath, Commutator) {
  const EdgeFlow expected{{Edge{{0, 0}, 1}, 1}, {Edge{{1, 0}, 2}, 1}, {Edge{{0, 1}, 1}, -1}, {Edge{{0, 0}, 2}, -1}};
  EXPECT_EQ(flow_of("x1 x2 X1 X2", 2), expected);
}

TEST(FlowOfPath, CubeCycle) {
  const EdgeFlow expected{{Edge{{0, 0, 0}, 1}, 1}, {Edge{{1, 0, 0}, 2}, 1},  {Edge{{1, 1, 0}, 3}, 1},
                          {Edge{{0, 1, 1}, 1}, -1}, {Edge{{0, 0, 1}, 2}, -1}, {Edge{{0, 0, 0}, 3}, -1}};
  EXPECT_EQ(flow_of("x1x2x3X1X2X3", 3), expected);
}

TEST(Divergence, PathHasUnitSourceAndSink) {
  const auto div = divergence(flow_of("x1 x1 x2 X1 x2", 2));
  const VertexMap expected{{LatticePoint({1, 2}), 1}, {LatticePoint({0, 0}), -1}};
  EXPECT_EQ(div, expected);
}

TEST(Divergence, PlacketIsClosed) { EXPECT_TRUE(divergence(placket(1, 2, {0, 0})).empty()); }

TEST(Divergence, SingleEdge) {
  const EdgeFlow f{{Edge{{0, 0}, 1}, 1}};
  const VertexMap expected{{LatticePoint({1, 0}), 1}, {LatticePoint({0, 0}), -1}};
  EXPECT_EQ(divergence(f), expected);
}

TEST(Divergence, RandomPaths) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 500; ++k) {
    const Word w = fixtures::random_word(rng, 3, 40);
    const auto v = abelianize(w);
    const auto div = divergence(flow_of_path(word_to_path(w)));
    if (v.is_zero()) {
      EXPECT_TRUE(div.empty());
    } else {
      const VertexMap expected{{v, 1}, {LatticePoint::origin(3), -1}};
      EXPECT_EQ(div, expected);
    }
  }
}

TEST(TranslateFlow, EmptyStaysEmpty) { EXPECT_TRUE(translate_flow(EdgeFlow{}, {3, -2}).empty()); }

TEST(TranslateFlow, PlacketShift) {
  EXPECT_EQ(translate_flow(placket(1, 2, {0, 0, 0}), {0, 0, 1}), placket(1, 2, {0, 0, 1}));
}

TEST(TranslateFlow, ActionLaw) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 300; ++k) {
    const auto f = flow_of_path(word_to_path(fixtures::random_word(rng, 3, 30)));
    const auto u = fixtures::random_point(rng, 3, -5, 5);
    const auto w = fixtures::random_point(rng, 3, -5, 5);
    EXPECT_EQ(translate_flow(translate_flow(f, u), w), translate_flow(f, u + w));
    EXPECT_EQ(translate_flow(f, LatticePoint::origin(3)), f);
  }
}

TEST(FlowOfPath, ConcatenationRule) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 1000; ++k) {
    const Word p = fixtures::random_word(rng, 3, 30);
    const Word q = fixtures::random_word(rng, 3, 30);
    const auto lhs = flow_of_path(word_to_path(concat(p, q)));
    const auto rhs = flow_of_path(word_to_path(p)) + translate_flow(flow_of_path(word_to_path(q)), abelianize(p));
    ASSERT_EQ(lhs, rhs);
  }
}

TEST(FlowOfPath, TotalVariationBoundedByLength) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 500; ++k) {
    const Word w = fixtures::random_word(rng, 2, 30);
    const auto f = flow_of_path(word_to_path(w));
    EXPECT_LE(f.total_variation(), static_cast<std::int64_t>(w.length()));
    // equality iff no edge is traversed both ways
    std::map<Edge, std::pair<int, int>> dirs;
    LatticePoint pos = LatticePoint::origin(2);
    for (int l : w.letters) {
      const int a = std::abs(l);
      LatticePoint next = pos;
      next.step(l);
      const Edge e{l > 0 ? pos : next, a};
      (l > 0 ? dirs[e].first : dirs[e].second)++;
      pos = next;
    }
    bool both = false;
    for (const auto& [e, c] : dirs) both = both || (c.first > 0 && c.second > 0);
    EXPECT_EQ(f.total_variation() == static_cast<std::int64_t>(w.length()), !both);
  }
}

TEST(EdgeFlow, DropsZeros) {
  EdgeFlow f;
  f.add(Edge{{0, 0}, 1}, 2);
  f.add(Edge{{0, 0}, 1}, -2);
  EXPECT_TRUE(f.empty());
  EXPECT_EQ(f.at(Edge{{0, 0}, 1}), 0);
}

TEST(LatticePoint, OverflowIsReported) {
  const LatticePoint big({INT64_MAX});
  EXPECT_THROW(big + LatticePoint({1}), OverflowError);
  EdgeFlow f;
  f.add(Edge{{0}, 1}, INT64_MAX);
  EXPECT_THROW(f.add(Edge{{0}, 1}, 1), OverflowError);
}

TEST(LatticePoint, DimensionMismatch) { EXPECT_THROW(LatticePoint({1, 2}) + LatticePoint({1}), DimensionMismatch); }
