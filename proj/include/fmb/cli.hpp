#pragma once

// Command-line front end. run() takes the argument list (without the program
// name) and writes primary output to `out`, diagnostics to `err`. Exit codes:
// 0 ok, 1 failure (including replay mismatch), 2 usage or malformed input,
// 3 budget exceeded.

#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fmb/boundary.hpp"
#include "fmb/errors.hpp"
#include "fmb/fox.hpp"
#include "fmb/geodesic.hpp"
#include "fmb/io.hpp"
#include "fmb/lamplighter.hpp"
#include "fmb/metabelian.hpp"
#include "fmb/nilpotent.hpp"
#include "fmb/variety.hpp"
#include "fmb/walk.hpp"
#include "fmb/word.hpp"

namespace fmb::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kBudget = 3 };

struct UsageError : Error {
  using Error::Error;
};

namespace detail {

struct Options {
  std::string variety = "metabelian";
  int d = 2;
  std::optional<std::int64_t> m;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string format = "json";
  std::string manifest;
  bool lamp_alias = false;
};

// Primary output buffer plus the exit code the command wants.
struct Output {
  std::string text;
  int code = kOk;

  void json(const Json& j) {
    text += dump(j);
    text += '\n';
  }
  void line(const std::string& s) {
    text += s;
    text += '\n';
  }
};

inline Json ci_json(const MeanCI& m) { return Json{{"mean", m.mean}, {"ci_low", m.low()}, {"ci_high", m.high()}}; }

inline std::string csv_row(std::uint64_t N, double value, std::optional<MeanCI> ci, const std::string& series) {
  std::string s = std::to_string(N) + "," + format_real(value) + ",";
  if (ci) s += format_real(ci->low()) + "," + format_real(ci->high());
  else s += ",";
  return s + "," + series;
}

inline constexpr const char* kSeriesHeader = "N,value,ci_low,ci_high,series";

// The operations every variety offers to eval / eq / mul / inv.
struct ElementOps {
  std::function<Json(const Word&)> eval;
  std::function<Json(const Word&, const Word&)> mul;
  std::function<Json(const Word&)> inv;
  std::function<Json(const Word&, const Word&)> eq;  // {"equal":..., differences...}
};

inline Json point_diff(const LatticePoint& a, const LatticePoint& b) { return to_json(a - b); }

inline ElementOps element_ops(Variety v, LampGroupSpec spec) {
  switch (v) {
    case Variety::abelian:
      return {[](const Word& w) { return abelian_json(abelianize(w)); },
              [](const Word& a, const Word& b) { return abelian_json(abelianize(a) + abelianize(b)); },
              [](const Word& w) { return abelian_json(-abelianize(w)); },
              [](const Word& a, const Word& b) {
                const auto x = abelianize(a), y = abelianize(b);
                return Json{{"equal", x == y}, {"endpoint_difference", point_diff(x, y)}};
              }};
    case Variety::free_group:
      return {[](const Word& w) { return free_json(free_reduce(w)); },
              [](const Word& a, const Word& b) { return free_json(free_reduce(concat(a, b))); },
              [](const Word& w) { return free_json(free_reduce(inverse(w))); },
              [](const Word& a, const Word& b) {
                const Word q = free_reduce(concat(a, inverse(b)));
                return Json{{"equal", q.letters.empty()}, {"quotient", format_word(q)}};
              }};
    case Variety::nilpotent2:
      return {[](const Word& w) { return to_json(nil_eval(w)); },
              [](const Word& a, const Word& b) { return to_json(nil_mul(nil_eval(a), nil_eval(b))); },
              [](const Word& w) { return to_json(nil_inv(nil_eval(w))); },
              [](const Word& a, const Word& b) {
                const auto x = nil_eval(a), y = nil_eval(b);
                Json areas = Json::array();
                for (int i = 1; i <= x.d; ++i)
                  for (int j = i + 1; j <= x.d; ++j) areas.push_back(Json{{"i", i}, {"j", j}, {"value", x.area(i, j) - y.area(i, j)}});
                return Json{{"equal", x == y}, {"endpoint_difference", point_diff(x.endpoint, y.endpoint)}, {"area_difference", areas}};
              }};
    case Variety::metabelian:
      return {[](const Word& w) { return to_json(mb_eval(w)); },
              [](const Word& a, const Word& b) { return to_json(mb_mul(mb_eval(a), mb_eval(b))); },
              [](const Word& w) { return to_json(mb_inv(mb_eval(w))); },
              [](const Word& a, const Word& b) {
                const auto x = mb_eval(a), y = mb_eval(b);
                const bool oracle = abelianize(a) == abelianize(b) && fox_flow_oracle(a) == fox_flow_oracle(b);
                return Json{{"equal", x == y},
                            {"endpoint_difference", point_diff(x.endpoint, y.endpoint)},
                            {"flow_difference", to_json(x.flow - y.flow)},
                            {"oracle_equal", oracle}};
              }};
    case Variety::lamplighter:
      return {[spec](const Word& w) { return to_json(ll_eval(w, spec)); },
              [spec](const Word& a, const Word& b) { return to_json(ll_mul(ll_eval(a, spec), ll_eval(b, spec))); },
              [spec](const Word& w) { return to_json(ll_inv(ll_eval(w, spec))); },
              [spec](const Word& a, const Word& b) {
                const auto x = ll_eval(a, spec), y = ll_eval(b, spec);
                LamplighterElement diff = LamplighterElement::identity(x.d, spec);
                for (const auto& [u, val] : x.lamps) diff.add_lamp(u, val);
                for (const auto& [u, val] : y.lamps) diff.add_lamp(u, -val);
                Json lamps = Json::array();
                for (const auto& [u, val] : diff.lamps) lamps.push_back(Json{{"node", to_json(u)}, {"value", val}});
                return Json{{"equal", x == y}, {"position_difference", point_diff(x.position, y.position)}, {"lamp_difference", lamps}};
              }};
  }
  throw Error("unknown variety");
}

inline std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
  return s;
}

// Effective value of every option on the parsed command chain.
inline Json effective_config(const std::vector<const CLI::App*>& chain) {
  Json cfg = Json::object();
  for (const CLI::App* app : chain) {
    for (const CLI::Option* opt : app->get_options()) {
      const std::string name = opt->get_single_name();
      if (name == "help" || name == "manifest" || name == "threads" || name == "version") continue;
      if (opt->count() > 0) {
        if (opt->get_expected_max() == 0) cfg[name] = true;
        else cfg[name] = join(opt->results());
      } else if (!opt->get_default_str().empty()) {
        cfg[name] = opt->get_default_str();
      } else if (opt->get_expected_max() == 0) {
        cfg[name] = false;
      }
    }
  }
  return cfg;
}

// Argument list with run-environment flags removed.
inline std::vector<std::string> canonical_args(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--manifest" || a == "--threads") {
      ++i;
      continue;
    }
    if (a.rfind("--manifest=", 0) == 0 || a.rfind("--threads=", 0) == 0) continue;
    out.push_back(a);
  }
  return out;
}

}  // namespace detail

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

namespace detail {

inline int replay(const std::string& path, std::optional<unsigned> threads, std::ostream& out, std::ostream& err) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open manifest '" + path + "'");
  Json m;
  try {
    m = Json::parse(in);
  } catch (const Json::exception& e) {
    throw UsageError(std::string("malformed manifest: ") + e.what());
  }
  std::vector<std::string> args = m.at("argv").get<std::vector<std::string>>();
  if (threads) {
    args.push_back("--threads");
    args.push_back(std::to_string(*threads));
  }
  std::ostringstream buf, diag;
  const int code = run(args, buf, diag);
  const std::string text = buf.str();
  out << text;
  err << diag.str();
  const std::string digest = digest_hex(text);
  if (digest != m.at("output_digest").get<std::string>() || code != m.at("exit_code").get<int>()) {
    err << "replay mismatch: expected " << m.at("output_digest").get<std::string>() << " (exit " << m.at("exit_code").get<int>()
        << "), got " << digest << " (exit " << code << ")\n";
    return kFailure;
  }
  return kOk;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  CLI::App app{"Free metabelian groups: word problem, geodesics, random walks and boundaries", "fmb"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--variety", o.variety, "abelian | free | nilpotent2 | metabelian | lamplighter")
      ->check(CLI::IsMember({"abelian", "free", "nilpotent2", "metabelian", "lamplighter"}))
      ->capture_default_str();
  app.add_option("--d", o.d, "rank (lattice dimension; the lamplighter base dimension)")->capture_default_str();
  app.add_option("--m", o.m, "lamp group order (0 for Z); lamplighter only");
  app.add_option("--seed", o.seed, "experiment seed (required by randomized commands)");
  app.add_option("--threads", o.threads, "worker threads; outputs do not depend on it")->capture_default_str();
  app.add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--manifest", o.manifest, "write an experiment manifest to this path");
  app.add_flag("--lamp-alias", o.lamp_alias, "accept a/A for the lamp letter");

  // eval / inv
  std::string word_a, word_b;
  auto* eval = app.add_subcommand("eval", "evaluate a word to its normal form");
  eval->add_option("word", word_a)->required();
  auto* inv = app.add_subcommand("inv", "inverse of a word's element");
  inv->add_option("word", word_a)->required();
  auto* eq = app.add_subcommand("eq", "decide equality of two words");
  eq->add_option("u", word_a)->required();
  eq->add_option("v", word_b)->required();
  auto* mul = app.add_subcommand("mul", "product of two words' elements");
  mul->add_option("u", word_a)->required();
  mul->add_option("v", word_b)->required();

  std::int64_t budget = 12;
  auto* minlen = app.add_subcommand("minlen", "shortest word for a metabelian element");
  minlen->add_option("word", word_a)->required();
  minlen->add_option("--budget", budget, "longest word the exact search may try")->capture_default_str();

  std::vector<std::uint64_t> horizons{1000};
  std::uint64_t samples = 1000;
  auto* walk = app.add_subcommand("walk", "drift (escape rate) of the simple random walk");
  walk->add_option("--N", horizons, "horizons")->delimiter(',')->capture_default_str();
  walk->add_option("--samples", samples, "trajectories")->capture_default_str();

  std::uint64_t radius = 10;
  std::uint64_t max_elements = kGrowthBudget;
  auto* growth = app.add_subcommand("growth", "ball and sphere sizes of the Cayley graph");
  growth->add_option("--N", radius, "largest radius")->capture_default_str();
  growth->add_option("--max-elements", max_elements, "stored element budget")->capture_default_str();

  std::uint64_t entropy_N = 8;
  std::uint64_t entropy_budget = kEntropyBudget;
  auto* entropy = app.add_subcommand("entropy", "exact entropy H(mu^N) of the step distribution");
  entropy->add_option("--N", entropy_N, "largest N")->capture_default_str();
  entropy->add_option("--budget", entropy_budget, "largest (2g)^N enumerated")->capture_default_str();

  std::optional<std::uint64_t> ineq_entropy_N, ineq_growth_N, ineq_samples;
  std::vector<std::uint64_t> ineq_drift_N;
  auto* inequality = app.add_subcommand("inequality", "bounds for entropy, drift and growth, and h <= c v");
  inequality->add_option("--entropy-N", ineq_entropy_N, "largest exact entropy N");
  inequality->add_option("--growth-N", ineq_growth_N, "largest growth radius");
  inequality->add_option("--drift-N", ineq_drift_N, "drift horizons")->delimiter(',');
  inequality->add_option("--samples", ineq_samples, "drift trajectories");

  auto* boundary = app.add_subcommand("boundary", "stable flows, Green functions, recurrence and final configurations");
  boundary->require_subcommand(1);
  boundary->fallthrough();

  std::uint64_t bN = 1000;
  int window = 5;
  std::uint64_t traj_index = 0;
  bool outside = false;
  auto* stable = boundary->add_subcommand("stable-flow", "edge flows at N/2 and N on a window");
  stable->add_option("--N", bN, "horizon")->capture_default_str();
  stable->add_option("--window", window, "window box radius")->capture_default_str();
  stable->add_option("--index", traj_index, "trajectory index under the seed")->capture_default_str();
  stable->add_flag("--outside", outside, "also count nonzero edges outside the window");

  std::vector<std::int64_t> point;
  double tol = 1e-6;
  std::uint64_t mc_walks = 0, mc_steps = 100000;
  int kernel = 64;
  auto* green = boundary->add_subcommand("green", "Green function G(0, x) of the simple walk");
  green->add_option("--x", point, "lattice point (default origin)")->delimiter(',');
  green->add_option("--tol", tol, "refinement tolerance")->capture_default_str();
  green->add_option("--walks", mc_walks, "Monte Carlo walks (0: quadrature only)")->capture_default_str();
  green->add_option("--steps", mc_steps, "Monte Carlo walk length")->capture_default_str();
  green->add_option("--kernel", kernel, "smoothing kernel steps")->capture_default_str();

  int axis = 1;
  auto* expected = boundary->add_subcommand("expected-flow", "expected stable flow on an edge");
  expected->add_option("--base", point, "edge base (default origin)")->delimiter(',');
  expected->add_option("--axis", axis, "edge axis")->capture_default_str();
  expected->add_option("--tol", tol, "refinement tolerance")->capture_default_str();

  std::vector<std::uint64_t> checkpoints{1000, 10000, 100000};
  std::uint64_t seeds = 1000;
  auto* recurrence = boundary->add_subcommand("recurrence", "traversals of edge (0, axis 1) up to checkpoints");
  recurrence->add_option("--checkpoints", checkpoints, "checkpoints")->delimiter(',')->capture_default_str();
  recurrence->add_option("--seeds", seeds, "trajectories")->capture_default_str();

  std::uint64_t verify_seeds = 4;
  auto* final_config = boundary->add_subcommand("final-config", "lamplighter lamp configuration stability");
  final_config->add_option("--N", checkpoints, "horizons")->delimiter(',')->capture_default_str();
  final_config->add_option("--window", window, "window box radius")->capture_default_str();
  final_config->add_option("--seeds", seeds, "trajectories")->capture_default_str();
  final_config->add_option("--verify-seeds", verify_seeds, "seeds cross-checked against the metabelian projection")
      ->capture_default_str();

  auto* stabilization = boundary->add_subcommand("stabilization", "fraction of walks with edge (0, axis 1) stabilized");
  stabilization->add_option("--N", checkpoints, "horizons")->delimiter(',')->capture_default_str();
  stabilization->add_option("--seeds", seeds, "trajectories")->capture_default_str();

  auto* origin = boundary->add_subcommand("origin-flow", "mean stable flow on the 2d origin edges");
  origin->add_option("--N", bN, "horizon")->capture_default_str();
  origin->add_option("--seeds", seeds, "trajectories")->capture_default_str();
  origin->add_option("--kernel", kernel, "smoothing kernel steps")->capture_default_str();

  std::string manifest_path;
  std::optional<unsigned> replay_threads;
  auto* replay_cmd = app.add_subcommand("replay", "re-run a manifest and check its output digest");
  replay_cmd->add_option("manifest", manifest_path)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  Output result;
  std::vector<const CLI::App*> chain{&app};
  std::string command;
  for (const CLI::App* a = &app; !a->get_subcommands().empty();) {
    a = a->get_subcommands().front();
    chain.push_back(a);
    command += (command.empty() ? "" : " ") + a->get_name();
  }

  try {
    if (replay_cmd->parsed()) {
      const auto* t = app.get_option("--threads");
      if (t->count() > 0) replay_threads = o.threads;
      return detail::replay(manifest_path, replay_threads, out, err);
    }

    const Variety variety = parse_variety(o.variety);
    if (o.m && variety != Variety::lamplighter && !final_config->parsed())
      throw UsageError("--m is only meaningful with --variety lamplighter");
    const LampGroupSpec spec(o.m.value_or(variety == Variety::lamplighter ? 2 : 0));
    WalkConfig cfg{variety, o.d, variety == Variety::lamplighter ? spec : LampGroupSpec{}};
    if (o.d < 1) throw UsageError("--d must be >= 1");

    auto need_seed = [&] {
      if (!o.seed) throw UsageError("'" + command + "' is randomized and requires --seed");
      return *o.seed;
    };
    const bool csv = o.format == "csv";
    auto json_only = [&] {
      if (csv) throw UsageError("'" + command + "' has JSON output only");
    };
    auto parse = [&](const std::string& text) {
      ParseOptions po;
      po.lamp_alias = o.lamp_alias;
      return parse_word(text, cfg.generators(), po);
    };

    if (eval->parsed() || inv->parsed() || eq->parsed() || mul->parsed()) {
      json_only();
      const ElementOps ops = element_ops(variety, cfg.lamp);
      if (eval->parsed()) result.json(ops.eval(parse(word_a)));
      if (inv->parsed()) result.json(ops.inv(parse(word_a)));
      if (mul->parsed()) result.json(ops.mul(parse(word_a), parse(word_b)));
      if (eq->parsed()) result.json(ops.eq(parse(word_a), parse(word_b)));
    } else if (minlen->parsed()) {
      json_only();
      if (variety != Variety::metabelian) throw UsageError("minlen is defined for --variety metabelian");
      const MetabelianElement g = mb_eval(parse(word_a));
      const LengthBounds b = length_bounds(g);
      const auto exact = min_word_exact(g, std::min<std::int64_t>(budget, b.upper));
      Json j{{"lower", exact ? static_cast<std::int64_t>(exact->length()) : b.lower},
             {"exact", exact ? Json(static_cast<std::int64_t>(exact->length())) : Json(nullptr)},
             {"upper", exact ? static_cast<std::int64_t>(exact->length()) : b.upper},
             {"witness", format_word(exact ? *exact : b.witness)}};
      result.json(j);
      if (!exact) {
        err << "exact search budget " << budget << " exceeded; reporting bounds\n";
        result.code = kBudget;
      }
    } else if (walk->parsed()) {
      const auto seed = need_seed();
      const DriftStats s = drift_estimate(cfg, horizons, samples, seed, o.threads);
      if (csv) {
        result.line(kSeriesHeader);
        for (const auto& p : s.points) {
          result.line(csv_row(p.N, p.lower.mean, p.lower, "lower"));
          result.line(csv_row(p.N, p.upper.mean, p.upper, "upper"));
          if (p.exact) result.line(csv_row(p.N, p.exact->mean, *p.exact, "exact"));
        }
      } else {
        Json pts = Json::array();
        for (const auto& p : s.points)
          pts.push_back(Json{{"N", p.N},
                             {"samples", p.samples},
                             {"lower", ci_json(p.lower)},
                             {"upper", ci_json(p.upper)},
                             {"exact", p.exact ? ci_json(*p.exact) : Json(nullptr)}});
        result.json(Json{{"variety", to_string(variety)}, {"d", o.d}, {"seed", seed}, {"drift", pts}});
      }
    } else if (growth->parsed()) {
      const GrowthStats g = sphere_sizes(cfg, radius, max_elements);
      if (csv) {
        result.line(kSeriesHeader);
        for (std::uint64_t n = 0; n <= g.radius(); ++n) {
          result.line(csv_row(n, static_cast<double>(g.ball[n]), std::nullopt, "ball"));
          result.line(csv_row(n, static_cast<double>(g.sphere[n]), std::nullopt, "sphere"));
          result.line(csv_row(n, g.log_volume[n], std::nullopt, "log_volume"));
        }
      } else {
        result.json(Json{{"variety", to_string(variety)},
                         {"d", o.d},
                         {"ball", g.ball},
                         {"sphere", g.sphere},
                         {"log_volume", g.log_volume},
                         {"truncated", g.truncated}});
      }
      if (g.truncated) {
        err << "element budget " << max_elements << " exceeded after radius " << g.radius() << "\n";
        result.code = kBudget;
      }
    } else if (entropy->parsed()) {
      const auto series = entropy_series(cfg, entropy_N, entropy_budget);
      if (csv) {
        result.line(kSeriesHeader);
        for (const auto& e : series) {
          result.line(csv_row(e.N, e.entropy, std::nullopt, "entropy"));
          result.line(csv_row(e.N, e.per_step, std::nullopt, "per_step"));
        }
      } else {
        Json pts = Json::array();
        for (const auto& e : series)
          pts.push_back(Json{{"N", e.N}, {"entropy", e.entropy}, {"per_step", e.per_step}, {"support", e.support}});
        result.json(Json{{"variety", to_string(variety)}, {"d", o.d}, {"entropy", pts}});
      }
    } else if (inequality->parsed()) {
      InequalityParams p = default_inequality_params(cfg);
      p.seed = need_seed();
      p.threads = o.threads;
      if (ineq_entropy_N) p.entropy_N = *ineq_entropy_N;
      if (ineq_growth_N) p.growth_N = *ineq_growth_N;
      if (!ineq_drift_N.empty()) p.drift_N = ineq_drift_N;
      if (ineq_samples) p.drift_samples = *ineq_samples;
      const InequalityReport r = inequality_report(cfg, p);
      if (csv) {
        result.line(kSeriesHeader);
        result.line(csv_row(r.h_upper_at, r.h_upper, std::nullopt, "h_upper"));
        const auto& last = r.drift.points.back();
        result.line(csv_row(last.N, r.c_estimate, last.upper, "c_upper"));
        result.line(csv_row(r.v_upper_at, r.v_upper, std::nullopt, "v_upper"));
        result.line(csv_row(last.N, r.product_upper, std::nullopt, "product_upper"));
      } else {
        result.json(Json{{"variety", to_string(variety)},
                         {"d", o.d},
                         {"seed", p.seed},
                         {"h_upper", r.h_upper},
                         {"h_upper_at", r.h_upper_at},
                         {"h_bound", r.h_from_increment ? "increment" : "average"},
                         {"c_estimate", r.c_estimate},
                         {"c_upper", r.c_upper},
                         {"v_upper", r.v_upper},
                         {"v_upper_at", r.v_upper_at},
                         {"product_upper", r.product_upper},
                         {"gap", r.gap},
                         {"relative_gap", r.relative_gap},
                         {"holds", r.holds}});
      }
    } else if (stable->parsed()) {
      const auto seed = need_seed();
      const Trajectory t(seed, traj_index, o.d, bN);
      const StableFlowReport r = limit_flow(t, bN, window, outside);
      if (csv) {
        std::string header;
        for (int i = 1; i <= o.d; ++i) header += "x" + std::to_string(i) + ",";
        result.line(header + "axis,value_half,value,stabilized");
        for (const auto& e : r.edges) {
          std::string row;
          for (auto c : e.edge.base.coords()) row += std::to_string(c) + ",";
          row += std::to_string(e.edge.axis) + "," + std::to_string(e.half) + "," + std::to_string(e.full) + "," +
                 (e.stabilized ? "true" : "false");
          result.line(row);
        }
      } else {
        Json edges = Json::array();
        for (const auto& e : r.edges)
          edges.push_back(Json{{"base", to_json(e.edge.base)},
                               {"axis", e.edge.axis},
                               {"value_half", e.half},
                               {"value", e.full},
                               {"stabilized", e.stabilized}});
        Json j{{"d", r.d},
               {"N", r.N},
               {"checkpoints", r.checkpoints},
               {"window", r.window},
               {"seed", seed},
               {"index", traj_index},
               {"endpoint_half", to_json(r.endpoint_half)},
               {"endpoint", to_json(r.endpoint_full)},
               {"edges", edges}};
        if (r.outside_nonzero) j["outside_nonzero"] = *r.outside_nonzero;
        result.json(j);
      }
    } else if (green->parsed()) {
      if (point.empty()) point.assign(static_cast<std::size_t>(o.d), 0);
      const LatticePoint x(point);
      const GreenValue g = green_numeric(x, o.d, tol);
      std::optional<GreenMonteCarlo> mc;
      if (mc_walks > 0) mc = green_monte_carlo(x, o.d, mc_walks, mc_steps, need_seed(), kernel, o.threads);
      if (csv) {
        result.line(kSeriesHeader);
        result.line(csv_row(g.grid, g.value, MeanCI{g.value, g.error}, "quadrature"));
        if (mc) {
          result.line(csv_row(mc->steps, mc->plain, MeanCI{mc->plain, mc->plain_se}, "monte_carlo_plain"));
          result.line(csv_row(mc->steps, mc->smoothed, MeanCI{mc->smoothed, mc->smoothed_se}, "monte_carlo_smoothed"));
        }
      } else {
        Json j{{"d", o.d}, {"x", to_json(x)}, {"value", g.value}, {"error", g.error}, {"grid", g.grid}};
        if (mc)
          j["monte_carlo"] = Json{{"walks", mc->walks},   {"steps", mc->steps},       {"kernel_steps", mc->kernel_steps},
                                  {"plain", mc->plain},   {"plain_se", mc->plain_se}, {"smoothed", mc->smoothed},
                                  {"smoothed_se", mc->smoothed_se}, {"tail", mc->tail}};
        result.json(j);
      }
    } else if (expected->parsed()) {
      json_only();
      if (point.empty()) point.assign(static_cast<std::size_t>(o.d), 0);
      if (axis < 1 || axis > o.d) throw UsageError("--axis must be in 1..d");
      const Edge e{LatticePoint(point), axis};
      result.json(Json{{"d", o.d}, {"base", to_json(e.base)}, {"axis", axis}, {"value", expected_flow(e, o.d, tol)}});
    } else if (recurrence->parsed()) {
      const auto seed = need_seed();
      const RecurrenceReport r = recurrence_probe(o.d, checkpoints, seeds, seed, o.threads);
      if (csv) {
        result.line(kSeriesHeader);
        for (std::size_t k = 0; k < r.checkpoints.size(); ++k) {
          result.line(csv_row(r.checkpoints[k], r.medians[k], std::nullopt, "median_traversals"));
          if (k > 0) result.line(csv_row(r.checkpoints[k], r.unchanged_fraction[k - 1], std::nullopt, "unchanged_fraction"));
        }
      } else {
        result.json(Json{{"d", r.d},
                         {"seed", seed},
                         {"seeds", seeds},
                         {"checkpoints", r.checkpoints},
                         {"medians", r.medians},
                         {"unchanged_fraction", r.unchanged_fraction}});
      }
    } else if (final_config->parsed()) {
      if (app.get_option("--variety")->count() > 0 && variety != Variety::lamplighter)
        throw UsageError("final-config runs on the lamplighter group");
      const WalkConfig lcfg{Variety::lamplighter, o.d, LampGroupSpec(o.m.value_or(2))};
      const auto seed = need_seed();
      const FinalConfigReport r = final_config_stability(lcfg, checkpoints, window, seeds, seed, verify_seeds, o.threads);
      if (csv) {
        result.line(kSeriesHeader);
        for (const auto& p : r.points) {
          result.line(csv_row(p.N, p.mean_stabilized_fraction, std::nullopt, "mean_stabilized"));
          result.line(csv_row(p.N, p.median_stabilized_fraction, std::nullopt, "median_stabilized"));
        }
      } else {
        Json pts = Json::array();
        for (const auto& p : r.points)
          pts.push_back(Json{{"N", p.N}, {"mean_stabilized", p.mean_stabilized_fraction}, {"median_stabilized", p.median_stabilized_fraction}});
        result.json(Json{{"d", r.d},
                         {"m", r.spec.m},
                         {"window", r.window},
                         {"seed", seed},
                         {"seeds", r.seeds},
                         {"points", pts},
                         {"verified_seeds", r.verified_seeds},
                         {"projection_consistent", r.projection_consistent}});
      }
    } else if (stabilization->parsed()) {
      const auto seed = need_seed();
      const auto pts = edge_stabilization_study(o.d, checkpoints, seeds, seed, o.threads);
      if (csv) {
        result.line(kSeriesHeader);
        for (const auto& p : pts) result.line(csv_row(p.N, p.stabilized_fraction, std::nullopt, "stabilized"));
      } else {
        Json a = Json::array();
        for (const auto& p : pts) a.push_back(Json{{"N", p.N}, {"stabilized", p.stabilized_fraction}});
        result.json(Json{{"d", o.d}, {"seed", seed}, {"seeds", seeds}, {"points", a}});
      }
    } else if (origin->parsed()) {
      json_only();
      const auto seed = need_seed();
      const OriginFlowStudy s = origin_flow_study(o.d, bN, seeds, seed, kernel, o.threads);
      Json edges = Json::array();
      for (const auto& e : s.edges)
        edges.push_back(Json{{"direction", e.direction}, {"mean", e.mean}, {"se", e.se}, {"stabilized", e.stabilized_fraction}});
      result.json(Json{{"d", s.d},
                       {"N", s.N},
                       {"seed", seed},
                       {"seeds", s.seeds},
                       {"edges", edges},
                       {"net_outflow", s.net_outflow_mean},
                       {"net_outflow_se", s.net_outflow_se},
                       {"green_plain", s.green.plain},
                       {"green_plain_se", s.green.plain_se},
                       {"green_smoothed", s.green.smoothed},
                       {"green_smoothed_se", s.green.smoothed_se}});
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const SyntaxError& e) {
    err << "syntax error: " << e.what() << "\n";
    return kUsage;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DimensionMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }

  out << result.text;
  if (!o.manifest.empty()) {
    Json m{{"command", command},
           {"argv", canonical_args(args)},
           {"config", effective_config(chain)},
           {"version", kVersion},
           {"exit_code", result.code},
           {"output_digest", digest_hex(result.text)}};
    std::ofstream f(o.manifest);
    if (!f) {
      err << "error: cannot write manifest '" << o.manifest << "'\n";
      return kFailure;
    }
    f << dump(m) << '\n';
  }
  return result.code;
}

}  // namespace fmb::cli
