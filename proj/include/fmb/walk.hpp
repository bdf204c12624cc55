#pragma once

// Random-walk laboratory: simple symmetric walks on the implemented groups and
// desk-scale bounds for the three asymptotic constants
//   v = lim log|W_{<=N}| / N   (logarithmic volume)
//   c = lim E L(g_N) / N       (escape rate, drift)
//   h = lim H(mu^{*N}) / N     (entropy)
// All three sequences are subadditive, so every finite-N value is an upper
// bound for its limit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fmb/errors.hpp"
#include "fmb/parallel.hpp"
#include "fmb/rng.hpp"
#include "fmb/variety.hpp"
#include "fmb/word.hpp"

namespace fmb {

inline constexpr double kNormalQuantile975 = 1.959963984540054;
inline constexpr std::uint64_t kEntropyBudget = 20'000'000;
inline constexpr std::uint64_t kGrowthBudget = 10'000'000;
inline constexpr std::uint64_t kExactDriftMaxN = 8;

inline Trajectory simulate(const WalkConfig& cfg, std::uint64_t seed, std::uint64_t steps, std::uint64_t index = 0) {
  return Trajectory(seed, index, cfg.generators(), steps);
}

inline Word trajectory_word(const Trajectory& t, std::uint64_t steps) {
  Word w{t.generators(), {}};
  w.letters.reserve(steps);
  for (std::uint64_t n = 0; n < steps; ++n) w.letters.push_back(t.letter(n));
  return w;
}

inline Word trajectory_word(const Trajectory& t) { return trajectory_word(t, t.steps()); }

// Group element reached after the whole trajectory.
template <class Engine>
typename Engine::Element walk_endpoint(const Engine& engine, const Trajectory& t) {
  auto e = engine.identity();
  for (std::uint64_t n = 0; n < t.steps(); ++n) engine.step(e, t.letter(n));
  return e;
}

struct MeanCI {
  double mean = 0;
  double half_width = 0;
  double low() const { return mean - half_width; }
  double high() const { return mean + half_width; }
};

inline MeanCI mean_ci(const std::vector<double>& xs, double z = kNormalQuantile975) {
  MeanCI r;
  if (xs.empty()) return r;
  double s = 0;
  for (double x : xs) s += x;
  r.mean = s / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.half_width = z * std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return r;
}

// Length statistics at one horizon; every value already divided by N.
struct DriftPoint {
  std::uint64_t N = 0;
  std::uint64_t samples = 0;
  MeanCI lower;
  MeanCI upper;
  std::optional<MeanCI> exact;
};

struct DriftStats {
  std::vector<DriftPoint> points;
};

inline DriftStats drift_estimate(const WalkConfig& cfg, std::vector<std::uint64_t> horizons, std::uint64_t samples,
                                 std::uint64_t seed, unsigned threads = 1) {
  if (samples < 1) throw RangeError("drift_estimate: samples must be >= 1");
  std::sort(horizons.begin(), horizons.end());
  horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
  if (horizons.empty() || horizons.front() < 1) throw RangeError("drift_estimate: horizons must be >= 1");

  const std::size_t H = horizons.size();
  // results[s * H + k] = bracket of sample s at horizon k
  std::vector<LengthBracket> results(samples * H);
  with_engine(cfg, [&](const auto& engine) {
    parallel_for(samples, threads, [&](std::uint64_t s) {
      const Trajectory t = simulate(cfg, seed, horizons.back(), s);
      auto e = engine.identity();
      Word path{cfg.generators(), {}};
      std::uint64_t n = 0;
      for (std::size_t k = 0; k < H; ++k) {
        for (; n < horizons[k]; ++n) {
          const int l = t.letter(n);
          engine.step(e, l);
          path.letters.push_back(l);
        }
        results[s * H + k] = engine.bracket(e, path, horizons[k] <= kExactDriftMaxN);
      }
    });
  });

  DriftStats out;
  for (std::size_t k = 0; k < H; ++k) {
    const double N = static_cast<double>(horizons[k]);
    std::vector<double> lo, up, ex;
    bool all_exact = true;
    for (std::uint64_t s = 0; s < samples; ++s) {
      const auto& b = results[s * H + k];
      lo.push_back(static_cast<double>(b.lower) / N);
      up.push_back(static_cast<double>(b.upper) / N);
      if (b.exact) {
        ex.push_back(static_cast<double>(*b.exact) / N);
      } else {
        all_exact = false;
      }
    }
    DriftPoint p{horizons[k], samples, mean_ci(lo), mean_ci(up), std::nullopt};
    if (all_exact) p.exact = mean_ci(ex);
    out.points.push_back(p);
  }
  return out;
}

inline DriftStats drift_estimate(const WalkConfig& cfg, std::uint64_t N, std::uint64_t samples, std::uint64_t seed,
                                 unsigned threads = 1) {
  return drift_estimate(cfg, std::vector<std::uint64_t>{N}, samples, seed, threads);
}

struct EntropyStats {
  std::uint64_t N = 0;
  double entropy = 0;   // H(mu^{*N}) in nats
  double per_step = 0;  // H_N / N, an upper bound for h
  std::uint64_t support = 0;
};

namespace detail {

inline std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (std::uint64_t k = 0; k < exp; ++k) {
    if (r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

// Shannon entropy (nats) of the distribution counts / total.
inline double entropy_of_counts(std::vector<std::uint64_t> counts, double total) {
  std::sort(counts.begin(), counts.end());
  long double acc = 0;
  for (auto c : counts) acc += static_cast<long double>(c) * std::log(static_cast<long double>(c));
  return static_cast<double>(std::log(static_cast<long double>(total)) - acc / static_cast<long double>(total));
}

}  // namespace detail

// Exact H(mu^{*n}) for n = 1..N_max. Every one of the (2g)^n words of length n
// is accounted for with its exact weight; the enumeration is organized as a
// convolution over normal forms so each distinct element is expanded once.
inline std::vector<EntropyStats> entropy_series(const WalkConfig& cfg, std::uint64_t N_max,
                                                std::uint64_t budget = kEntropyBudget) {
  const auto alphabet = static_cast<std::uint64_t>(cfg.alphabet());
  if (detail::checked_pow(alphabet, N_max, budget) > budget)
    throw BudgetExceeded("entropy: " + std::to_string(alphabet) + "^" + std::to_string(N_max) + " words exceeds budget " +
                         std::to_string(budget));
  std::vector<EntropyStats> out;
  with_engine(cfg, [&](const auto& engine) {
    using Element = typename std::decay_t<decltype(engine)>::Element;
    struct Atom {
      Element element;
      std::uint64_t count;
    };
    std::unordered_map<std::string, Atom> current;
    std::string key;
    {
      auto id = engine.identity();
      engine.key(id, key);
      current.emplace(key, Atom{id, 1});
    }
    const auto letters = letter_order(cfg.generators());
    double total = 1;
    for (std::uint64_t n = 1; n <= N_max; ++n) {
      std::unordered_map<std::string, Atom> next;
      next.reserve(current.size() * 2);
      for (const auto& [k, atom] : current) {
        for (int l : letters) {
          Element e = atom.element;
          engine.step(e, l);
          key.clear();
          engine.key(e, key);
          auto [it, inserted] = next.try_emplace(key, Atom{e, 0});
          it->second.count += atom.count;
        }
      }
      current.swap(next);
      total *= static_cast<double>(alphabet);
      std::vector<std::uint64_t> counts;
      counts.reserve(current.size());
      for (const auto& [k, atom] : current) counts.push_back(atom.count);
      const double H = detail::entropy_of_counts(std::move(counts), total);
      out.push_back({n, H, H / static_cast<double>(n), current.size()});
    }
  });
  return out;
}

inline EntropyStats entropy_exact(const WalkConfig& cfg, std::uint64_t N, std::uint64_t budget = kEntropyBudget) {
  if (N == 0) return {0, 0, 0, 1};
  return entropy_series(cfg, N, budget).back();
}

struct GrowthStats {
  std::vector<std::uint64_t> ball;    // |W_{<=N}|, N = 0..radius
  std::vector<std::uint64_t> sphere;  // |W_{=N}|
  std::vector<double> log_volume;     // log|W_{<=N}| / N (0 at N = 0)
  bool truncated = false;
  std::uint64_t radius() const { return ball.empty() ? 0 : ball.size() - 1; }
};

// Breadth-first search of the Cayley graph with normal-form deduplication.
// Stops early with truncated = true once more than max_elements are stored;
// the radii reported are then exact, only the last ones are missing.
inline GrowthStats sphere_sizes(const WalkConfig& cfg, std::uint64_t N_max, std::uint64_t max_elements = kGrowthBudget) {
  GrowthStats g;
  with_engine(cfg, [&](const auto& engine) {
    using Element = typename std::decay_t<decltype(engine)>::Element;
    std::unordered_set<std::string> seen;
    std::vector<Element> frontier{engine.identity()};
    std::string key;
    engine.key(frontier.front(), key);
    seen.insert(key);
    g.ball.push_back(1);
    g.sphere.push_back(1);
    g.log_volume.push_back(0.0);
    const auto letters = letter_order(cfg.generators());
    for (std::uint64_t n = 1; n <= N_max; ++n) {
      std::vector<Element> next;
      bool overflow = false;
      for (const auto& e : frontier) {
        for (int l : letters) {
          Element f = e;
          engine.step(f, l);
          key.clear();
          engine.key(f, key);
          if (seen.insert(key).second) next.push_back(std::move(f));
        }
        if (seen.size() > max_elements) {
          overflow = true;
          break;
        }
      }
      if (overflow) {
        g.truncated = true;
        return;
      }
      g.sphere.push_back(next.size());
      g.ball.push_back(g.ball.back() + next.size());
      g.log_volume.push_back(std::log(static_cast<double>(g.ball.back())) / static_cast<double>(n));
      frontier.swap(next);
    }
  });
  return g;
}

struct InequalityParams {
  std::uint64_t entropy_N = 8;
  std::uint64_t growth_N = 10;
  std::vector<std::uint64_t> drift_N{1000};
  std::uint64_t drift_samples = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

inline InequalityParams default_inequality_params(const WalkConfig& cfg) {
  InequalityParams p;
  switch (cfg.variety) {
    case Variety::abelian:
      p.entropy_N = 12;
      p.growth_N = 20;
      break;
    case Variety::free_group:
      p.entropy_N = cfg.d <= 2 ? 12 : 9;
      p.growth_N = cfg.d <= 2 ? 12 : 9;
      break;
    case Variety::nilpotent2:
    case Variety::metabelian:
      p.entropy_N = cfg.d <= 2 ? 10 : 7;
      p.growth_N = cfg.d <= 2 ? 10 : 8;
      break;
    case Variety::lamplighter:
      p.entropy_N = 7;
      p.growth_N = 7;
      break;
  }
  return p;
}

// Best desk-scale bounds for h, c and v. Each "upper" value is a bound that
// holds for the limit (exactly for h and v; up to the stated confidence
// interval for c). The report states whether h_upper <= c_upper * v_upper;
// it never asserts equality or strict inequality of the limits.
struct InequalityReport {
  WalkConfig cfg;
  InequalityParams params;

  std::vector<EntropyStats> entropy;
  double h_upper = 0;
  std::uint64_t h_upper_at = 0;  // N giving the bound
  bool h_from_increment = false; // bound is H_N - H_{N-1} rather than H_N / N

  DriftStats drift;
  double c_estimate = 0;  // mean upper-length / N at the largest horizon
  double c_upper = 0;

  GrowthStats growth;
  double v_upper = 0;
  std::uint64_t v_upper_at = 0;

  double product_upper = 0;  // c_upper * v_upper
  double gap = 0;            // product_upper - h_upper
  double relative_gap = 0;   // |gap| / h_upper
  bool holds = false;        // h_upper <= product_upper
};

inline InequalityReport inequality_report(const WalkConfig& cfg, const InequalityParams& p) {
  InequalityReport r;
  r.cfg = cfg;
  r.params = p;

  r.entropy = entropy_series(cfg, p.entropy_N);
  r.h_upper = std::numeric_limits<double>::infinity();
  double prev = 0;
  for (const auto& e : r.entropy) {
    // H_N / N >= h by subadditivity; H_N - H_{N-1} >= h since the increments
    // of H(mu^{*N}) are nonincreasing with limit h.
    if (e.per_step < r.h_upper) {
      r.h_upper = e.per_step;
      r.h_upper_at = e.N;
      r.h_from_increment = false;
    }
    const double inc = e.entropy - prev;
    if (e.N > 1 && inc < r.h_upper) {
      r.h_upper = inc;
      r.h_upper_at = e.N;
      r.h_from_increment = true;
    }
    prev = e.entropy;
  }
  r.h_upper = std::max(0.0, r.h_upper);

  r.drift = drift_estimate(cfg, p.drift_N, p.drift_samples, p.seed, p.threads);
  r.c_upper = std::numeric_limits<double>::infinity();
  for (const auto& pt : r.drift.points) r.c_upper = std::min(r.c_upper, pt.upper.high());
  r.c_estimate = r.drift.points.back().upper.mean;

  r.growth = sphere_sizes(cfg, p.growth_N);
  r.v_upper = std::numeric_limits<double>::infinity();
  // log|W_{<=N}| and log|S_N| are both subadditive in N.
  for (std::uint64_t n = 1; n <= r.growth.radius(); ++n) {
    const double by_ball = r.growth.log_volume[n];
    const double by_sphere = std::log(static_cast<double>(std::max<std::uint64_t>(1, r.growth.sphere[n]))) / static_cast<double>(n);
    const double b = std::min(by_ball, by_sphere);
    if (b < r.v_upper) {
      r.v_upper = b;
      r.v_upper_at = n;
    }
  }

  r.product_upper = r.c_upper * r.v_upper;
  r.gap = r.product_upper - r.h_upper;
  r.relative_gap = r.h_upper > 0 ? std::abs(r.gap) / r.h_upper : 0.0;
  r.holds = r.h_upper <= r.product_upper;
  return r;
}

}  // namespace fmb
