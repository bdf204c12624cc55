#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fmb/io.hpp"
#include "support.hpp"

using namespace fmb;

TEST(Json, MetabelianPlacket) {
  const auto g = mb_eval(parse_word("x1 x2 X1 X2", 2));
  EXPECT_EQ(dump(to_json(g)),
            R"({"variety":"metabelian","d":2,"endpoint":[0,0],"flow":[)"
            R"({"base":[0,0],"axis":1,"mult":1},{"base":[0,0],"axis":2,"mult":-1},)"
            R"({"base":[0,1],"axis":1,"mult":-1},{"base":[1,0],"axis":2,"mult":1}]})");
}

TEST(Json, MetabelianRoundTrip) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const auto g = mb_eval(fixtures::random_word(rng, 3, 40));
    EXPECT_EQ(metabelian_from_json(Json::parse(dump(to_json(g)))), g);
  }
}

TEST(Json, OtherVarieties) {
  EXPECT_EQ(dump(abelian_json(abelianize(parse_word("x1 x1 X2", 2)))), R"({"variety":"abelian","d":2,"endpoint":[2,-1]})");
  EXPECT_EQ(dump(free_json(free_reduce(parse_word("x1 x2 X2 x1", 2)))), R"({"variety":"free","d":2,"word":"x1^2","length":2})");
  EXPECT_EQ(dump(to_json(nil_eval(parse_word("x1x2X1X2", 3)))),
            R"({"variety":"nilpotent2","d":3,"endpoint":[0,0,0],"areas":[{"i":1,"j":2,"value":1},{"i":1,"j":3,"value":0},{"i":2,"j":3,"value":0}]})");
  ParseOptions o;
  o.lamp_alias = true;
  EXPECT_EQ(dump(to_json(ll_eval(parse_word("x1 a", 2, o), LampGroupSpec(2)))),
            R"({"variety":"lamplighter","d":1,"m":2,"position":[1],"lamps":[{"node":[1],"value":1}]})");
}

TEST(Dump, SeventeenDigitReals) {
  EXPECT_EQ(dump(Json(0.1)), "0.10000000000000001");
  EXPECT_EQ(dump(Json(1.0 / 3.0)), "0.33333333333333331");
  EXPECT_EQ(dump(Json(2.0)), "2");
  EXPECT_EQ(dump(Json(std::numeric_limits<double>::infinity())), "null");
  EXPECT_EQ(dump(Json(std::int64_t{-9007199254740993})), "-9007199254740993");
  EXPECT_EQ(format_real(0.5), "0.5");
  EXPECT_EQ(format_real(std::nan("")), "nan");
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng);
    EXPECT_EQ(std::stod(dump(Json(v))), v);
  }
}

TEST(Dump, KeepsInsertionOrderAndEscapes) {
  Json j;
  j["z"] = 1;
  j["a"] = "q\"x";
  j["m"] = Json::array({true, nullptr});
  EXPECT_EQ(dump(j), R"({"z":1,"a":"q\"x","m":[true,null]})");
}

TEST(Digest, Fnv1a) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
  EXPECT_EQ(digest_hex("a"), "fnv1a64:af63dc4c8601ec8c");
}
