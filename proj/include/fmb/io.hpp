#pragma once

// JSON forms of group elements and a canonical serializer: compact, keys in
// insertion order as built here, integers exact, reals with 17 significant
// digits. Output bytes are therefore a pure function of the value.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "fmb/lamplighter.hpp"
#include "fmb/lattice.hpp"
#include "fmb/metabelian.hpp"
#include "fmb/nilpotent.hpp"
#include "fmb/word.hpp"

namespace fmb {

using Json = nlohmann::ordered_json;

inline Json to_json(const LatticePoint& p) {
  Json a = Json::array();
  for (auto c : p.coords()) a.push_back(c);
  return a;
}

inline LatticePoint point_from_json(const Json& j) {
  std::vector<std::int64_t> c;
  for (const auto& v : j) c.push_back(v.get<std::int64_t>());
  return LatticePoint(std::move(c));
}

// [{"base":[..],"axis":i,"mult":m}], sorted by (base, axis), no zeros.
inline Json to_json(const EdgeFlow& f) {
  Json a = Json::array();
  for (const auto& [e, m] : f.entries()) a.push_back(Json{{"base", to_json(e.base)}, {"axis", e.axis}, {"mult", m}});
  return a;
}

inline EdgeFlow flow_from_json(const Json& j) {
  EdgeFlow f;
  for (const auto& e : j) f.add(Edge{point_from_json(e.at("base")), e.at("axis").get<int>()}, e.at("mult").get<std::int64_t>());
  return f;
}

inline Json to_json(const MetabelianElement& g) {
  return Json{{"variety", "metabelian"}, {"d", g.d}, {"endpoint", to_json(g.endpoint)}, {"flow", to_json(g.flow)}};
}

inline MetabelianElement metabelian_from_json(const Json& j) {
  return {j.at("d").get<int>(), point_from_json(j.at("endpoint")), flow_from_json(j.at("flow"))};
}

inline Json to_json(const NilpotentElement& g) {
  Json areas = Json::array();
  for (int i = 1; i <= g.d; ++i)
    for (int j = i + 1; j <= g.d; ++j) areas.push_back(Json{{"i", i}, {"j", j}, {"value", g.area(i, j)}});
  return Json{{"variety", "nilpotent2"}, {"d", g.d}, {"endpoint", to_json(g.endpoint)}, {"areas", areas}};
}

inline Json to_json(const LamplighterElement& g) {
  Json lamps = Json::array();
  for (const auto& [u, v] : g.lamps) lamps.push_back(Json{{"node", to_json(u)}, {"value", v}});
  return Json{{"variety", "lamplighter"}, {"d", g.d}, {"m", g.spec.m}, {"position", to_json(g.position)}, {"lamps", lamps}};
}

inline Json abelian_json(const LatticePoint& p) {
  return Json{{"variety", "abelian"}, {"d", p.dim()}, {"endpoint", to_json(p)}};
}

// Free group element given by its freely reduced word.
inline Json free_json(const Word& reduced) {
  return Json{{"variety", "free"}, {"d", reduced.d}, {"word", format_word(reduced)}, {"length", reduced.length()}};
}

namespace detail {

inline void dump_to(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        dump_to(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        dump_to(v, out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
      } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
      }
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string dump(const Json& j) {
  std::string out;
  detail::dump_to(j, out);
  return out;
}

// Same 17-digit rule for CSV cells.
inline std::string format_real(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string digest_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string("fnv1a64:") + buf;
}

}  // namespace fmb
