#pragma once

// Counter-based normal generator. Every Monte Carlo draw is addressed by
// (seed, stream id, position), so results do not depend on how samples are
// distributed over threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace proxmse {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). 128-bit counter, 64-bit key.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t key) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  Block operator()(Block ctr) const noexcept {
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
      ctr = round_once(ctr, k);
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Block round_once(const Block& c, const std::array<std::uint32_t, 2>& k) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }

  std::array<std::uint32_t, 2> key_;
};

/// Purpose tags keep draws for different roles (signal construction, MC
/// samples, denoising noise, sensing matrices) on disjoint streams.
enum class StreamPurpose : std::uint8_t {
  kSignal = 1,
  kSubspace = 2,
  kMsd = 3,
  kDenoise = 4,
  kLassoMatrix = 5,
  kLassoNoise = 6,
  kTest = 7,
};

/// Packs (purpose, a, b) into a 64-bit stream id: 8 bits purpose, 24 bits a,
/// 32 bits b. `a` is an outer index (grid point), `b` an inner one (trial).
constexpr std::uint64_t stream_id(StreamPurpose purpose, std::uint32_t a, std::uint32_t b) noexcept {
  return (static_cast<std::uint64_t>(purpose) << 56) |
         (static_cast<std::uint64_t>(a & 0xFFFFFFu) << 32) | static_cast<std::uint64_t>(b);
}

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept : philox_(seed), stream_(stream) {}

  std::uint64_t next_u64() noexcept {
    if (pos_ == 2) refill();
    return buffer_[pos_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_left() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
  }

  double sign() noexcept { return (next_u64() >> 63) ? 1.0 : -1.0; }

  /// Standard normal via Box-Muller. Pairs are cached, so the sequence is a
  /// pure function of (seed, stream).
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open_left();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  template <class Range>
  void fill_normal(Range&& out) noexcept {
    for (auto& x : out) x = normal();
  }

 private:
  void refill() noexcept {
    const Philox4x32::Block ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const auto out = philox_(ctr);
    buffer_[0] = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    buffer_[1] = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    ++block_;
    pos_ = 0;
  }

  Philox4x32 philox_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int pos_ = 2;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace proxmse
