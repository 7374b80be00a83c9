#pragma once

#include <array>
#include <cstdint>

namespace multibai {

// SplitMix64, used only to expand seed material into generator state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256++ stream. Each trial owns one stream; disjoint streams are
// derived from (base_seed, stream_id) so trials can run in parallel and
// still reproduce bit-for-bit.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : RngStream(seed, 0) {}

  // The xoshiro state is filled from SplitMix64 seeded with
  // base_seed XOR (0x9E3779B97F4A7C15 * (stream_id + 1)).
  RngStream(std::uint64_t base_seed, std::uint64_t stream_id) {
    SplitMix64 sm(base_seed ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1)));
    bool all_zero = true;
    for (auto& s : state_) {
      s = sm.next();
      all_zero = all_zero && s == 0;
    }
    if (all_zero) state_[0] = 1;
  }

  static RngStream for_stream(std::uint64_t base_seed, std::uint64_t stream_id) {
    return RngStream(base_seed, stream_id);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double next_double01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace multibai
