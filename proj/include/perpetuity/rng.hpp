#pragma once

#include <array>
#include <cstdint>

namespace perpetuity {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// A stream is addressed by (seed, stream id, index). The seed is the key; the
// stream id and the index live in the counter together with a 32-bit block
// number, so every coordinate maps to an independent, reproducible sequence
// regardless of which thread consumes it or in which order.

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

/// Well-known stream ids. Different consumers of the same (seed, index) never
/// share random numbers.
enum class StreamId : std::uint32_t {
  Perpetuity = 0,
  DominatingSeries = 1,
  ModulusPath = 2,
  Geometric = 3,
  FiniteHorizon = 4,
};

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, StreamId stream, std::uint64_t index) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(static_cast<std::uint32_t>(stream)),
        index_(index) {}

  std::uint64_t next_u64() noexcept {
    if (used_ == 2) refill();
    return buffer_[used_++];
  }

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint32_t blocks_consumed() const noexcept { return block_; }

 private:
  void refill() noexcept {
    const PhiloxCounter out = philox4x32_10(
        {block_, stream_, static_cast<std::uint32_t>(index_),
         static_cast<std::uint32_t>(index_ >> 32)},
        key_);
    ++block_;
    buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
    buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
    used_ = 0;
  }

  PhiloxKey key_;
  std::uint32_t stream_;
  std::uint64_t index_;
  std::uint32_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int used_ = 2;
};

}  // namespace perpetuity
