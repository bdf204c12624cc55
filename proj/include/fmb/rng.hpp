#pragma once

// Counter-based random letters. Philox4x32-10 (Salmon et al., SC'11) keyed by
// the experiment seed; the 128-bit counter is (trajectory index, step block).
// Any step of any trajectory can be regenerated without replaying the others.

#include <array>
#include <cstdint>

namespace fmb {

class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  static Block generate(Block ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

// Uniform 32-bit words addressed by (seed, stream, position).
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

  // Words 4b .. 4b+3.
  Philox4x32::Block block(std::uint64_t b) const {
    return Philox4x32::generate({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                                 static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                                key_);
  }

  std::uint32_t at(std::uint64_t position) const {
    const std::uint64_t b = position / 4;
    if (b != cached_block_ || !cached_) {
      cache_ = block(b);
      cached_block_ = b;
      cached_ = true;
    }
    return cache_[position % 4];
  }

  // Uniform double in [0, 1) from two consecutive words at 2*position.
  double uniform(std::uint64_t position) const {
    const std::uint64_t hi = at(2 * position) >> 5;
    const std::uint64_t lo = at(2 * position + 1) >> 6;
    return static_cast<double>(hi * 67108864u + lo) * (1.0 / 9007199254740992.0);
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  mutable Philox4x32::Block cache_{};
  mutable std::uint64_t cached_block_ = 0;
  mutable bool cached_ = false;
};

// Maps a 32-bit word to one of `alphabet` letters in the order
// +1, -1, +2, -2, ... by multiply-shift.
inline int letter_from_word(std::uint32_t u, int alphabet) {
  const auto j = static_cast<int>((std::uint64_t{u} * static_cast<std::uint64_t>(alphabet)) >> 32);
  const int axis = j / 2 + 1;
  return (j % 2 == 0) ? axis : -axis;
}

// A simple random walk path: letter n is a pure function of
// (seed, index, n). Nothing is stored.
class Trajectory {
 public:
  Trajectory(std::uint64_t seed, std::uint64_t index, int generators, std::uint64_t steps)
      : seed_(seed), index_(index), generators_(generators), steps_(steps), stream_(seed, index) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }
  int generators() const { return generators_; }
  std::uint64_t steps() const { return steps_; }

  int letter(std::uint64_t n) const { return letter_from_word(stream_.at(n), 2 * generators_); }

  // Calls f(n, letter) for n in [begin, end), generating whole blocks.
  template <class F>
  void for_each_letter(std::uint64_t begin, std::uint64_t end, F&& f) const {
    const int alphabet = 2 * generators_;
    std::uint64_t n = begin;
    while (n < end) {
      const auto words = stream_.block(n / 4);
      for (std::uint64_t j = n % 4; j < 4 && n < end; ++j, ++n) f(n, letter_from_word(words[j], alphabet));
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  int generators_;
  std::uint64_t steps_;
  CounterStream stream_;
};

}  // namespace fmb
