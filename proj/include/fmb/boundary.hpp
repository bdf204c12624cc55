#pragma once

// Boundary laboratory. The stable-flow map sends an infinite lattice path to
// the eventual value of its edge flow on every edge; here it is observed at
// finite horizons (an edge is "stabilized" when its value at N/2 equals its
// value at N). Also: lattice Green functions, their Monte Carlo cross-check,
// recurrence probes and lamplighter final configurations.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <unordered_map>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "fmb/errors.hpp"
#include "fmb/lamplighter.hpp"
#include "fmb/lattice.hpp"
#include "fmb/metabelian.hpp"
#include "fmb/parallel.hpp"
#include "fmb/rng.hpp"
#include "fmb/variety.hpp"
#include "fmb/walk.hpp"

namespace fmb {

inline constexpr int kMaxWalkDim = 8;

namespace detail {

// Position of a simple walk on Z^d with O(1) "at origin" test.
class WalkPosition {
 public:
  explicit WalkPosition(int d) : d_(d) {
    if (d < 1 || d > kMaxWalkDim) throw RangeError("walk dimension must be in 1..8");
  }

  void step(int letter) {
    auto& c = pos_[static_cast<std::size_t>(std::abs(letter) - 1)];
    const bool was_zero = c == 0;
    c += letter > 0 ? 1 : -1;
    nonzero_ += (c == 0 ? 0 : 1) - (was_zero ? 0 : 1);
  }

  bool at_origin() const { return nonzero_ == 0; }
  std::int64_t operator[](int i) const { return pos_[static_cast<std::size_t>(i)]; }
  int dim() const { return d_; }

  LatticePoint point() const {
    return LatticePoint(std::vector<std::int64_t>(pos_.begin(), pos_.begin() + d_));
  }

 private:
  int d_;
  std::array<std::int64_t, kMaxWalkDim> pos_{};
  int nonzero_ = 0;
};

// Dense indexing of the box [-r, r]^d, first coordinate most significant, so
// index order is lexicographic order of points.
class Box {
 public:
  Box(int d, int radius) : d_(d), r_(radius), side_(2 * radius + 1) {
    if (radius < 0) throw RangeError("window radius must be >= 0");
    size_ = 1;
    for (int i = 0; i < d; ++i) size_ *= static_cast<std::size_t>(side_);
  }

  std::size_t size() const { return size_; }
  int radius() const { return r_; }

  template <class P>
  std::optional<std::size_t> index(const P& p) const {
    std::size_t idx = 0;
    for (int i = 0; i < d_; ++i) {
      const std::int64_t c = p[i];
      if (c < -r_ || c > r_) return std::nullopt;
      idx = idx * static_cast<std::size_t>(side_) + static_cast<std::size_t>(c + r_);
    }
    return idx;
  }

  LatticePoint point(std::size_t idx) const {
    std::vector<std::int64_t> c(static_cast<std::size_t>(d_));
    for (int i = d_ - 1; i >= 0; --i) {
      c[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(idx % static_cast<std::size_t>(side_)) - r_;
      idx /= static_cast<std::size_t>(side_);
    }
    return LatticePoint(std::move(c));
  }

 private:
  int d_;
  int r_;
  int side_;
  std::size_t size_;
};

inline double median(std::vector<double> xs) {
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Stable flows

struct StableFlowEdge {
  Edge edge;
  std::int64_t half = 0;  // value at N/2
  std::int64_t full = 0;  // value at N
  bool stabilized = true;
};

struct StableFlowReport {
  int d = 3;
  std::uint64_t N = 0;
  std::array<std::uint64_t, 2> checkpoints{};
  int window = 0;
  std::vector<StableFlowEdge> edges;  // every edge with base in the window box, sorted
  LatticePoint endpoint_half;
  LatticePoint endpoint_full;
  std::optional<std::uint64_t> outside_nonzero;  // nonzero edges outside the window at N
};

inline StableFlowReport limit_flow(const Trajectory& traj, std::uint64_t N, int window, bool summarize_outside = false) {
  if (N < 2) throw RangeError("limit_flow: horizon must be >= 2");
  const int d = traj.generators();
  detail::Box box(d, window);
  std::vector<std::int64_t> values(box.size() * static_cast<std::size_t>(d), 0);
  std::vector<std::int64_t> half_values;
  std::unordered_map<std::uint64_t, std::int64_t> outside;
  detail::WalkPosition pos(d);
  StableFlowReport rep{d, N, {N / 2, N}, window, {}, {}, {}, std::nullopt};

  auto outside_key = [&](const detail::WalkPosition& p, int axis) {
    std::uint64_t k = static_cast<std::uint64_t>(axis);
    for (int i = 0; i < d; ++i) k = k * 1000003u + static_cast<std::uint64_t>(p[i] + (1 << 30));
    return k;
  };

  const std::uint64_t half = N / 2;
  auto record = [&](int letter) {
    const int axis = std::abs(letter);
    std::int64_t mult = 1;
    if (letter < 0) {
      pos.step(letter);
      mult = -1;
    }
    if (auto idx = box.index(pos)) {
      values[*idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(axis - 1)] += mult;
    } else if (summarize_outside) {
      auto& v = outside[outside_key(pos, axis)];
      v += mult;
    }
    if (letter > 0) pos.step(letter);
  };
  traj.for_each_letter(0, N, [&](std::uint64_t n, int letter) {
    if (n == half) {
      half_values = values;
      rep.endpoint_half = pos.point();
    }
    record(letter);
  });
  if (half == N) half_values = values;  // unreachable for N >= 2
  rep.endpoint_full = pos.point();

  rep.edges.reserve(values.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    const LatticePoint base = box.point(i);
    for (int a = 1; a <= d; ++a) {
      const std::size_t k = i * static_cast<std::size_t>(d) + static_cast<std::size_t>(a - 1);
      rep.edges.push_back({Edge{base, a}, half_values[k], values[k], half_values[k] == values[k]});
    }
  }
  if (summarize_outside) {
    std::uint64_t nz = 0;
    for (const auto& [k, v] : outside) nz += v != 0;
    rep.outside_nonzero = nz;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Green function of the simple random walk on Z^d, d >= 3

struct GreenValue {
  double value = 0;
  double error = 0;  // last change between successive extrapolated refinements
  std::uint64_t grid = 0;
};

namespace detail {

// Integral of |u|^-2 over the cube [-1/2, 1/2]^d, d = 3 or 4. Splitting the
// cube into 2d pyramids over its faces reduces it to a smooth integral over
// [-1, 1]^(d-1).
inline double inverse_square_cube_integral(int d) {
  using boost::math::quadrature::gauss;
  double face = 0;
  if (d == 3) {
    face = gauss<double, 30>::integrate(
        [](double s) { return gauss<double, 30>::integrate([s](double t) { return 1.0 / (1.0 + s * s + t * t); }, -1.0, 1.0); }, -1.0,
        1.0);
  } else if (d == 4) {
    face = gauss<double, 20>::integrate(
        [](double s) {
          return gauss<double, 20>::integrate(
              [s](double t) {
                return gauss<double, 20>::integrate([s, t](double u) { return 1.0 / (1.0 + s * s + t * t + u * u); }, -1.0, 1.0);
              },
              -1.0, 1.0);
        },
        -1.0, 1.0);
  } else {
    throw RangeError("green_numeric supports d = 3 or 4");
  }
  // each pyramid: int_0^{1/2} x^{d-3} dx * face
  return 2.0 * d * std::pow(0.5, d - 2) / (d - 2) * face;
}

// Punctured midpoint/trapezoid sum of cos(k.x) / (1 - phi(k)) on the periodic
// grid k = 2 pi j / n, plus the origin cell from phi ~ 1 - |k|^2 / (2d).
// The integrand is even in each k_i, so only j_i in [0, n/2] are visited.
inline double green_grid_sum(const std::vector<std::int64_t>& x, int d, std::uint64_t n, double cube_integral) {
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  const std::uint64_t m = n / 2;
  std::vector<double> cosk(m + 1), weight(m + 1);
  std::vector<std::vector<double>> cosx(static_cast<std::size_t>(d), std::vector<double>(m + 1));
  for (std::uint64_t j = 0; j <= m; ++j) {
    cosk[j] = std::cos(static_cast<double>(j) * h);
    weight[j] = (j == 0 || j == m) ? 1.0 : 2.0;
    for (int i = 0; i < d; ++i)
      cosx[static_cast<std::size_t>(i)][j] = std::cos(static_cast<double>(j) * h * static_cast<double>(x[static_cast<std::size_t>(i)]));
  }
  long double total = 0;
  const double inv_d = 1.0 / d;
  std::vector<std::uint64_t> idx(static_cast<std::size_t>(d), 0);
  // Innermost axis vectorized by hand; outer axes by odometer.
  const int outer = d - 1;
  for (;;) {
    double phi_outer = 0, w_outer = 1, c_outer = 1;
    bool all_zero = true;
    for (int i = 0; i < outer; ++i) {
      const auto j = idx[static_cast<std::size_t>(i)];
      phi_outer += cosk[j];
      w_outer *= weight[j];
      c_outer *= cosx[static_cast<std::size_t>(i)][j];
      all_zero = all_zero && j == 0;
    }
    double row = 0;
    const auto& cx_last = cosx[static_cast<std::size_t>(outer)];
    for (std::uint64_t j = all_zero ? 1 : 0; j <= m; ++j) {
      const double phi = (phi_outer + cosk[j]) * inv_d;
      row += weight[j] * cx_last[j] / (1.0 - phi);
    }
    total += static_cast<long double>(w_outer * c_outer * row);
    int a = outer - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] > m) idx[static_cast<std::size_t>(a--)] = 0;
    if (a < 0) break;
  }
  const double cell = 2.0 * d * std::pow(h, d - 2) * cube_integral;
  return static_cast<double>((total * std::pow(h, d) + cell) / std::pow(2.0 * std::numbers::pi, d));
}

}  // namespace detail

// G(0, x) by quadrature of the lattice Fourier integral
//   G(0, x) = (2 pi)^-d  int_{[-pi, pi]^d} cos(k.x) / (1 - (1/d) sum cos k_i) dk.
// The punctured rule has error ~ h^(d-2); grids are doubled with Richardson
// extrapolation until two successive extrapolants differ by less than tol.
inline GreenValue green_numeric(const LatticePoint& x, int d, double tol = 1e-6, std::uint64_t max_grid = 1024) {
  if (d <= 2) throw RangeError("green_numeric: the walk is recurrent for d <= 2 and G diverges");
  if (static_cast<int>(x.dim()) != d) throw DimensionMismatch("green_numeric: point dimension mismatch");
  // Symmetry of G under sign changes and permutations: canonicalize so the
  // result is exactly invariant.
  std::vector<std::int64_t> c;
  for (auto v : x.coords()) c.push_back(v < 0 ? -v : v);
  std::sort(c.begin(), c.end());

  const double cube = detail::inverse_square_cube_integral(d);
  const double factor = std::pow(2.0, d - 2);
  std::uint64_t n = 32;
  double q_prev = detail::green_grid_sum(c, d, n, cube);
  std::optional<double> r_prev;
  GreenValue out;
  for (n *= 2; n <= max_grid; n *= 2) {
    const double q = detail::green_grid_sum(c, d, n, cube);
    const double r = (factor * q - q_prev) / (factor - 1.0);
    if (r_prev) {
      out = {r, std::abs(r - *r_prev), n};
      if (out.error < tol && n >= 128) return out;
    }
    r_prev = r;
    q_prev = q;
  }
  return out;  // best effort at max_grid; error field tells the caller
}

struct GreenTable {
  int d = 3;
  double tolerance = 0;
  std::map<LatticePoint, double> values;
};

// G(0, x) for all ||x||_1 <= radius.
inline GreenTable green_table(int d, int radius, double tol = 1e-6) {
  if (d <= 2) throw RangeError("green_table: d must be >= 3");
  GreenTable t{d, tol, {}};
  detail::Box box(d, radius);
  std::map<std::vector<std::int64_t>, double> cache;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const LatticePoint p = box.point(i);
    if (p.l1_norm() > radius) continue;
    std::vector<std::int64_t> key;
    for (auto v : p.coords()) key.push_back(std::abs(v));
    std::sort(key.begin(), key.end());
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, green_numeric(LatticePoint(key), d, tol).value).first;
    t.values.emplace(p, it->second);
  }
  return t;
}

// Expected eventual flow on an edge under the stable-flow map:
// (G(0, base) - G(0, base + e_axis)) / (2d).
inline double expected_flow(const Edge& e, int d, double tol = 1e-6) {
  if (d <= 2) throw RangeError("expected_flow: d must be >= 3");
  return (green_numeric(e.base, d, tol).value - green_numeric(e.head(), d, tol).value) / (2.0 * d);
}

// Sum over n > N of P(S_n = x) from the local limit theorem, averaged over
// parity: int_N^inf (d / (2 pi n))^(d/2) dn.
inline double green_tail(int d, std::uint64_t N) {
  const double a = std::pow(d / (2.0 * std::numbers::pi), d / 2.0);
  return a * std::pow(static_cast<double>(N), 1.0 - d / 2.0) / (d / 2.0 - 1.0);
}

// Exact k-step transition probabilities P(S_k = z) on the box ||z||_inf <= k,
// with the history P(S_n = x), n < k, of one tracked point x.
class TransitionKernel {
 public:
  TransitionKernel(int d, int k, std::vector<std::int64_t> tracked = {}) : box_(d, k) {
    if (k < 0) throw RangeError("kernel steps must be >= 0");
    if (tracked.empty()) tracked.assign(static_cast<std::size_t>(d), 0);
    if (static_cast<int>(tracked.size()) != d) throw DimensionMismatch("tracked point dimension mismatch");
    p_.assign(box_.size(), 0.0);
    p_[*box_.index(std::vector<std::int64_t>(static_cast<std::size_t>(d), 0))] = 1.0;
    std::vector<double> next(box_.size());
    std::vector<std::size_t> stride(static_cast<std::size_t>(d));
    std::size_t s = 1;
    for (int i = d - 1; i >= 0; --i) {
      stride[static_cast<std::size_t>(i)] = s;
      s *= static_cast<std::size_t>(2 * k + 1);
    }
    for (int step = 1; step <= k; ++step) {
      history_.push_back(at(tracked));
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t idx = 0; idx < box_.size(); ++idx) {
        if (p_[idx] == 0.0) continue;
        const LatticePoint pt = box_.point(idx);
        const double share = p_[idx] / (2.0 * d);
        for (int i = 0; i < d; ++i) {
          const auto c = pt[static_cast<std::size_t>(i)];
          if (c + 1 <= k) next[idx + stride[static_cast<std::size_t>(i)]] += share;
          if (c - 1 >= -k) next[idx - stride[static_cast<std::size_t>(i)]] += share;
        }
      }
      p_.swap(next);
    }
  }

  int steps() const { return box_.radius(); }

  // P(S_k = z).
  template <class P>
  double at(const P& z) const {
    auto idx = box_.index(z);
    return idx ? p_[*idx] : 0.0;
  }

  // sum_{n<k} P(S_n = tracked).
  double head() const {
    double s = 0;
    for (double v : history_) s += v;
    return s;
  }

 private:
  detail::Box box_;
  std::vector<double> p_;
  std::vector<double> history_;
};

struct GreenMonteCarlo {
  double plain = 0;     // visit counts up to N, plus the analytic tail
  double plain_se = 0;
  double smoothed = 0;  // visit counts smoothed by the exact k-step kernel
  double smoothed_se = 0;
  double tail = 0;
  std::uint64_t walks = 0;
  std::uint64_t steps = 0;
  int kernel_steps = 0;
};

namespace detail {

inline void mean_se(const std::vector<double>& xs, double& mean, double& se) {
  const MeanCI m = mean_ci(xs, 1.0);
  mean = m.mean;
  se = m.half_width;
}

}  // namespace detail

// Monte Carlo estimate of G(0, x). The smoothed estimator replaces the visit
// indicator at time n >= k by its conditional expectation given S_{n-k}:
//   G = sum_{n<k} P(S_n = x) + E sum_{m=0}^{N-k} P(S_k = x - S_m) + tail(N).
inline GreenMonteCarlo green_monte_carlo(const LatticePoint& x, int d, std::uint64_t walks, std::uint64_t steps, std::uint64_t seed,
                                         int kernel_steps = 64, unsigned threads = 1) {
  if (d <= 2) throw RangeError("green_monte_carlo: d must be >= 3");
  if (static_cast<std::uint64_t>(kernel_steps) > steps) throw RangeError("green_monte_carlo: kernel longer than walk");
  const TransitionKernel kernel(d, kernel_steps, x.coords());
  const double head = kernel.head();
  std::vector<double> plain(walks), smooth(walks);
  parallel_for(walks, threads, [&](std::uint64_t w) {
    const Trajectory t(seed, w, d, steps);
    detail::WalkPosition pos(d);
    std::array<std::int64_t, kMaxWalkDim> diff{};
    auto delta = [&] {
      for (int i = 0; i < d; ++i) diff[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - pos[i];
      return diff;
    };
    auto visits_x = [&] {
      for (int i = 0; i < d; ++i)
        if (pos[i] != x[static_cast<std::size_t>(i)]) return false;
      return true;
    };
    double v = visits_x() ? 1.0 : 0.0;
    double s = kernel.at(delta());
    const std::uint64_t last_smoothed = steps - static_cast<std::uint64_t>(kernel_steps);
    t.for_each_letter(0, steps, [&](std::uint64_t n, int letter) {
      pos.step(letter);
      if (visits_x()) v += 1.0;
      if (n + 1 <= last_smoothed) s += kernel.at(delta());
    });
    plain[w] = v;
    smooth[w] = s;
  });
  GreenMonteCarlo r;
  r.walks = walks;
  r.steps = steps;
  r.kernel_steps = kernel_steps;
  r.tail = green_tail(d, steps);
  detail::mean_se(plain, r.plain, r.plain_se);
  detail::mean_se(smooth, r.smoothed, r.smoothed_se);
  r.plain += r.tail;
  r.smoothed += head + r.tail;
  return r;
}

// ---------------------------------------------------------------------------
// Flow on the 2d edges at the origin

struct OriginEdgeStats {
  int direction = 1;  // +i: edge to e_i, -i: edge to -e_i; flow oriented away from 0
  double mean = 0;
  double se = 0;
  double stabilized_fraction = 0;
};

struct OriginFlowStudy {
  int d = 3;
  std::uint64_t N = 0;
  std::uint64_t seeds = 0;
  std::vector<OriginEdgeStats> edges;  // directions +1, -1, +2, -2, ...
  double net_outflow_mean = 0;         // sum over the 2d edges, per seed
  double net_outflow_se = 0;
  GreenMonteCarlo green;               // G(0, 0) estimates from the same walks
};

// One pass over `seeds` walks of length N: outward flow on each origin edge at
// N/2 and N, plus visit counts of the origin for the Green cross-check.
inline OriginFlowStudy origin_flow_study(int d, std::uint64_t N, std::uint64_t seeds, std::uint64_t seed, int kernel_steps = 64,
                                         unsigned threads = 1) {
  if (N < 2 || seeds < 1) throw RangeError("origin_flow_study: need N >= 2 and seeds >= 1");
  const int dirs = 2 * d;
  std::vector<std::int64_t> half(seeds * static_cast<std::uint64_t>(dirs)), full(seeds * static_cast<std::uint64_t>(dirs));
  std::vector<double> plain(seeds), smooth(seeds);
  const TransitionKernel kernel(d, kernel_steps);
  const std::uint64_t last_smoothed = N - static_cast<std::uint64_t>(kernel_steps);
  auto slot = [](int letter) { return static_cast<std::size_t>(2 * (std::abs(letter) - 1) + (letter < 0 ? 1 : 0)); };

  parallel_for(seeds, threads, [&](std::uint64_t s) {
    const Trajectory t(seed, s, d, N);
    detail::WalkPosition pos(d);
    std::array<std::int64_t, 2 * kMaxWalkDim> out{};
    std::array<std::int64_t, kMaxWalkDim> p{};
    double visits = 1.0;
    double sm = kernel.at(p);
    t.for_each_letter(0, N, [&](std::uint64_t n, int letter) {
      if (n == N / 2)
        for (int k = 0; k < dirs; ++k) half[s * static_cast<std::uint64_t>(dirs) + static_cast<std::uint64_t>(k)] = out[static_cast<std::size_t>(k)];
      if (pos.at_origin()) out[slot(letter)] += 1;
      pos.step(letter);
      if (pos.at_origin()) {
        out[slot(-letter)] -= 1;
        visits += 1.0;
      }
      if (n + 1 <= last_smoothed) {
        for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] = pos[i];
        sm += kernel.at(p);
      }
    });
    for (int k = 0; k < dirs; ++k) full[s * static_cast<std::uint64_t>(dirs) + static_cast<std::uint64_t>(k)] = out[static_cast<std::size_t>(k)];
    plain[s] = visits;
    smooth[s] = sm;
  });

  OriginFlowStudy st;
  st.d = d;
  st.N = N;
  st.seeds = seeds;
  std::vector<double> net(seeds, 0.0);
  for (int k = 0; k < dirs; ++k) {
    std::vector<double> xs(seeds);
    std::uint64_t stable = 0;
    for (std::uint64_t s = 0; s < seeds; ++s) {
      const auto i = s * static_cast<std::uint64_t>(dirs) + static_cast<std::uint64_t>(k);
      xs[s] = static_cast<double>(full[i]);
      net[s] += xs[s];
      stable += half[i] == full[i];
    }
    OriginEdgeStats e;
    e.direction = (k % 2 == 0) ? (k / 2 + 1) : -(k / 2 + 1);
    detail::mean_se(xs, e.mean, e.se);
    e.stabilized_fraction = static_cast<double>(stable) / static_cast<double>(seeds);
    st.edges.push_back(e);
  }
  detail::mean_se(net, st.net_outflow_mean, st.net_outflow_se);

  const double head = kernel.head();
  GreenMonteCarlo& g = st.green;
  g.walks = seeds;
  g.steps = N;
  g.kernel_steps = kernel_steps;
  g.tail = green_tail(d, N);
  detail::mean_se(plain, g.plain, g.plain_se);
  detail::mean_se(smooth, g.smoothed, g.smoothed_se);
  g.plain += g.tail;
  g.smoothed += head + g.tail;
  return st;
}

// ---------------------------------------------------------------------------
// Stabilization of edge (0, axis 1) across horizons

struct StabilizationPoint {
  std::uint64_t N = 0;
  double stabilized_fraction = 0;  // seeds whose value at N/2 equals value at N
};

inline std::vector<StabilizationPoint> edge_stabilization_study(int d, std::vector<std::uint64_t> horizons, std::uint64_t seeds,
                                                               std::uint64_t seed, unsigned threads = 1) {
  std::sort(horizons.begin(), horizons.end());
  if (horizons.empty() || horizons.front() < 2) throw RangeError("edge_stabilization_study: horizons must be >= 2");
  std::vector<std::uint64_t> checkpoints;
  for (auto N : horizons) {
    checkpoints.push_back(N / 2);
    checkpoints.push_back(N);
  }
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  const std::size_t C = checkpoints.size();
  std::vector<std::int64_t> values(seeds * C);

  parallel_for(seeds, threads, [&](std::uint64_t s) {
    const Trajectory t(seed, s, d, horizons.back());
    detail::WalkPosition pos(d);
    std::int64_t flow = 0;
    std::size_t next = 0;
    auto snap = [&](std::uint64_t n) {
      while (next < C && checkpoints[next] == n) values[s * C + next++] = flow;
    };
    t.for_each_letter(0, horizons.back(), [&](std::uint64_t n, int letter) {
      snap(n);
      if (letter == 1 && pos.at_origin()) ++flow;
      pos.step(letter);
      if (letter == -1 && pos.at_origin()) --flow;
    });
    snap(horizons.back());
  });

  std::vector<StabilizationPoint> out;
  for (auto N : horizons) {
    const auto a = static_cast<std::size_t>(std::lower_bound(checkpoints.begin(), checkpoints.end(), N / 2) - checkpoints.begin());
    const auto b = static_cast<std::size_t>(std::lower_bound(checkpoints.begin(), checkpoints.end(), N) - checkpoints.begin());
    std::uint64_t stable = 0;
    for (std::uint64_t s = 0; s < seeds; ++s) stable += values[s * C + a] == values[s * C + b];
    out.push_back({N, static_cast<double>(stable) / static_cast<double>(seeds)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Recurrence probe: traversals of edge (0, axis 1) in either direction

struct RecurrenceReport {
  int d = 1;
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> medians;                 // per checkpoint, over seeds
  std::vector<double> unchanged_fraction;      // seeds with equal counts at checkpoints k-1 and k (k >= 1)
  std::vector<std::vector<std::uint64_t>> counts;  // counts[s][k]
};

inline RecurrenceReport recurrence_probe(int d, std::vector<std::uint64_t> checkpoints, std::uint64_t seeds, std::uint64_t seed,
                                         unsigned threads = 1) {
  std::sort(checkpoints.begin(), checkpoints.end());
  if (checkpoints.empty() || seeds < 1) throw RangeError("recurrence_probe: need checkpoints and seeds");
  RecurrenceReport r{d, checkpoints, {}, {}, std::vector<std::vector<std::uint64_t>>(seeds)};
  parallel_for(seeds, threads, [&](std::uint64_t s) {
    const Trajectory t(seed, s, d, checkpoints.back());
    detail::WalkPosition pos(d);
    std::uint64_t count = 0;
    std::size_t next = 0;
    auto& row = r.counts[s];
    t.for_each_letter(0, checkpoints.back(), [&](std::uint64_t n, int letter) {
      while (next < checkpoints.size() && checkpoints[next] == n) {
        row.push_back(count);
        ++next;
      }
      if (letter == 1 && pos.at_origin()) ++count;
      pos.step(letter);
      if (letter == -1 && pos.at_origin()) ++count;
    });
    while (row.size() < checkpoints.size()) row.push_back(count);
  });
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    std::vector<double> xs;
    for (const auto& row : r.counts) xs.push_back(static_cast<double>(row[k]));
    r.medians.push_back(detail::median(std::move(xs)));
    if (k > 0) {
      std::uint64_t same = 0;
      for (const auto& row : r.counts) same += row[k] == row[k - 1];
      r.unchanged_fraction.push_back(static_cast<double>(same) / static_cast<double>(seeds));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Lamplighter final configurations

struct FinalConfigPoint {
  std::uint64_t N = 0;
  double mean_stabilized_fraction = 0;    // over seeds, of window nodes equal at N/2 and N
  double median_stabilized_fraction = 0;
};

struct FinalConfigReport {
  int d = 3;
  LampGroupSpec spec;
  int window = 5;
  std::uint64_t seeds = 0;
  std::vector<FinalConfigPoint> points;
  std::uint64_t verified_seeds = 0;
  bool projection_consistent = true;  // window lamps == ll_project(mb_eval(prefix)) on verified seeds
};

inline FinalConfigReport final_config_stability(const WalkConfig& cfg, std::vector<std::uint64_t> horizons, int window,
                                                std::uint64_t seeds, std::uint64_t seed, std::uint64_t verify_seeds = 4,
                                                unsigned threads = 1) {
  if (cfg.variety != Variety::lamplighter) throw Error("final_config_stability: needs a lamplighter configuration");
  std::sort(horizons.begin(), horizons.end());
  if (horizons.empty() || horizons.front() < 2) throw RangeError("final_config_stability: horizons must be >= 2");
  const int d = cfg.d;
  const detail::Box box(d, window);
  std::vector<std::uint64_t> checkpoints;
  for (auto N : horizons) {
    checkpoints.push_back(N / 2);
    checkpoints.push_back(N);
  }
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  const std::size_t C = checkpoints.size();
  const std::size_t H = horizons.size();

  std::vector<double> fractions(seeds * H);
  std::vector<char> consistent(seeds, 1);
  parallel_for(seeds, threads, [&](std::uint64_t s) {
    const Trajectory t(seed, s, cfg.generators(), horizons.back());
    const bool verify = s < verify_seeds;
    detail::WalkPosition pos(d);
    std::vector<std::int64_t> lamps(box.size(), 0);
    std::vector<std::vector<std::int64_t>> snaps(C);
    auto ll = LamplighterElement::identity(d, cfg.lamp);
    auto mb = MetabelianElement::identity(d + 1);
    std::size_t next = 0;
    auto snap = [&](std::uint64_t n) {
      while (next < C && checkpoints[next] == n) {
        snaps[next] = lamps;
        if (verify) {
          const auto projected = ll_project(mb, cfg.lamp);
          bool ok = projected == ll;
          for (std::size_t i = 0; ok && i < box.size(); ++i) {
            auto it = ll.lamps.find(box.point(i));
            ok = (it == ll.lamps.end() ? 0 : it->second) == lamps[i];
          }
          if (!ok) consistent[s] = 0;
        }
        ++next;
      }
    };
    t.for_each_letter(0, horizons.back(), [&](std::uint64_t n, int letter) {
      snap(n);
      if (std::abs(letter) == d + 1) {
        if (auto idx = box.index(pos)) lamps[*idx] = cfg.lamp.reduce(lamps[*idx] + (letter > 0 ? 1 : -1));
      } else {
        pos.step(letter);
      }
      if (verify) {
        ll.step(letter);
        mb.step(letter);
      }
    });
    snap(horizons.back());
    for (std::size_t h = 0; h < H; ++h) {
      const auto a = static_cast<std::size_t>(std::lower_bound(checkpoints.begin(), checkpoints.end(), horizons[h] / 2) - checkpoints.begin());
      const auto b = static_cast<std::size_t>(std::lower_bound(checkpoints.begin(), checkpoints.end(), horizons[h]) - checkpoints.begin());
      std::size_t same = 0;
      for (std::size_t i = 0; i < box.size(); ++i) same += snaps[a][i] == snaps[b][i];
      fractions[s * H + h] = static_cast<double>(same) / static_cast<double>(box.size());
    }
  });

  FinalConfigReport rep{d, cfg.lamp, window, seeds, {}, std::min(verify_seeds, seeds), true};
  for (std::uint64_t s = 0; s < seeds; ++s) rep.projection_consistent = rep.projection_consistent && consistent[s];
  for (std::size_t h = 0; h < H; ++h) {
    std::vector<double> xs;
    for (std::uint64_t s = 0; s < seeds; ++s) xs.push_back(fractions[s * H + h]);
    const MeanCI m = mean_ci(xs);
    rep.points.push_back({horizons[h], m.mean, detail::median(std::move(xs))});
  }
  return rep;
}

}  // namespace fmb
