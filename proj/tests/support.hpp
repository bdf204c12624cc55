#pragma once

// Test helpers: random words and elements, and independent reference
// computations that share no code with the library paths they check.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "fmb/metabelian.hpp"
#include "fmb/variety.hpp"
#include "fmb/word.hpp"

namespace fmb::fixtures {

inline Word random_word(std::mt19937_64& rng, int d, std::size_t max_len, std::size_t min_len = 0) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<int> letter(0, 2 * d - 1);
  Word w{d, {}};
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const int j = letter(rng);
    w.letters.push_back(j % 2 == 0 ? j / 2 + 1 : -(j / 2 + 1));
  }
  return w;
}

// Closed word: w followed by a staircase back to the origin.
inline Word random_closed_word(std::mt19937_64& rng, int d, std::size_t max_len) {
  Word w = random_word(rng, d, max_len);
  const LatticePoint end = abelianize(w);
  for (int i = 0; i < d; ++i) {
    const auto c = end[static_cast<std::size_t>(i)];
    for (std::int64_t k = 0; k < std::abs(c); ++k) w.letters.push_back(c > 0 ? -(i + 1) : i + 1);
  }
  return w;
}

inline LatticePoint random_point(std::mt19937_64& rng, int d, std::int64_t lo, std::int64_t hi) {
  std::uniform_int_distribution<std::int64_t> c(lo, hi);
  std::vector<std::int64_t> v(static_cast<std::size_t>(d));
  for (auto& x : v) x = c(rng);
  return LatticePoint(std::move(v));
}

namespace oracle {

inline std::string metabelian_key(const MetabelianElement& g) {
  std::string k;
  MetabelianEngine{g.d}.key(g, k);
  return k;
}

// Minimal word length of every element of the ball of radius L, found by
// evaluating every word of length <= L.
inline std::unordered_map<std::string, int> enumerate_min_lengths(int d, int L) {
  std::unordered_map<std::string, int> best;
  Word w{d, {}};
  auto visit = [&](auto&& self, int depth) -> void {
    const std::string k = metabelian_key(mb_eval(w));
    auto [it, inserted] = best.emplace(k, depth);
    if (!inserted && depth < it->second) it->second = depth;
    if (depth == L) return;
    for (int a = 1; a <= d; ++a)
      for (int l : {a, -a}) {
        w.letters.push_back(l);
        self(self, depth + 1);
        w.letters.pop_back();
      }
  };
  visit(visit, 0);
  return best;
}

inline double entropy_of(const std::vector<double>& p) {
  double h = 0;
  for (double x : p)
    if (x > 0) h -= x * std::log(x);
  return h;
}

// Dense convolution of the step law on Z^d.
inline double abelian_entropy(int d, int N) {
  const int side = 2 * N + 1;
  std::size_t size = 1;
  for (int i = 0; i < d; ++i) size *= static_cast<std::size_t>(side);
  std::vector<double> p(size, 0.0), q(size);
  std::vector<std::size_t> stride(static_cast<std::size_t>(d));
  std::size_t s = 1;
  for (int i = 0; i < d; ++i) {
    stride[static_cast<std::size_t>(i)] = s;
    s *= static_cast<std::size_t>(side);
  }
  std::size_t center = 0;
  for (int i = 0; i < d; ++i) center += static_cast<std::size_t>(N) * stride[static_cast<std::size_t>(i)];
  p[center] = 1.0;
  for (int n = 0; n < N; ++n) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t idx = 0; idx < size; ++idx) {
      if (p[idx] == 0) continue;
      for (int i = 0; i < d; ++i) {
        const auto st = stride[static_cast<std::size_t>(i)];
        q[idx + st] += p[idx] / (2.0 * d);
        q[idx - st] += p[idx] / (2.0 * d);
      }
    }
    p.swap(q);
  }
  return entropy_of(p);
}

inline std::size_t abelian_support(int d, int N) {
  // points with ||x||_1 <= N and ||x||_1 = N mod 2
  std::size_t count = 0;
  std::vector<int> x(static_cast<std::size_t>(d), -N);
  for (;;) {
    int l1 = 0;
    for (int c : x) l1 += std::abs(c);
    if (l1 <= N && (N - l1) % 2 == 0) ++count;
    int a = 0;
    while (a < d && ++x[static_cast<std::size_t>(a)] > N) x[static_cast<std::size_t>(a++)] = -N;
    if (a == d) break;
  }
  return count;
}

// Free group on d generators: the reduced length is a birth-death chain and,
// given its value k, the element is uniform on the 2d(2d-1)^(k-1) reduced
// words of length k.
inline double free_entropy(int d, int N) {
  const double q = 2.0 * d;
  std::vector<double> p(static_cast<std::size_t>(N) + 2, 0.0), next(p.size());
  p[0] = 1;
  for (int n = 0; n < N; ++n) {
    std::fill(next.begin(), next.end(), 0.0);
    next[1] += p[0];
    for (int k = 1; k <= N; ++k) {
      next[static_cast<std::size_t>(k) + 1] += p[static_cast<std::size_t>(k)] * (q - 1) / q;
      next[static_cast<std::size_t>(k) - 1] += p[static_cast<std::size_t>(k)] / q;
    }
    p.swap(next);
  }
  double h = 0;
  for (int k = 0; k <= N; ++k) {
    const double pk = p[static_cast<std::size_t>(k)];
    if (pk <= 0) continue;
    const double words = k == 0 ? 1.0 : q * std::pow(q - 1, k - 1);
    h -= pk * std::log(pk / words);
  }
  return h;
}

// G(0, x) = int_0^inf prod_i exp(-t/d) I_{x_i}(t/d) dt (continuous-time walk
// with the same jump chain). Composite Simpson on [0, T] plus the
// two-term large-t asymptotic tail.
inline double green_bessel(const std::vector<std::int64_t>& x, double T = 2000.0, double h = 0.05) {
  const int d = static_cast<int>(x.size());
  auto f = [&](double t) {
    if (t == 0) {
      for (auto c : x)
        if (c != 0) return 0.0;
      return 1.0;
    }
    double r = 1;
    const double z = t / d;
    for (auto c : x) r *= std::exp(-z) * std::cyl_bessel_i(static_cast<double>(std::abs(c)), z);
    return r;
  };
  const auto n = static_cast<std::size_t>(T / h);
  double s = f(0) + f(T);
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(static_cast<double>(i) * h);
  double integral = s * h / 3.0;
  double c = 0;
  for (auto v : x) c += (4.0 * static_cast<double>(v * v) - 1.0) * d / 8.0;
  const double a = std::pow(d / (2.0 * std::numbers::pi), d / 2.0);
  integral += a * (std::pow(T, 1.0 - d / 2.0) / (d / 2.0 - 1.0) - c * std::pow(T, -d / 2.0) / (d / 2.0));
  return integral;
}

}  // namespace oracle
}  // namespace fmb::fixtures
