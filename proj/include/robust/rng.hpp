#pragma once

#include <cstdint>

#include "robust/normal.hpp"

namespace robust {

// Deterministic counter-based random stream.
//
// Output i is a pure function of (seed, stream_id, i) built from 64-bit
// integer mixing only, so a stream replays identically on every platform and
// under any thread schedule. Distinct (seed, stream_id) pairs give
// statistically independent sequences; child() derives a fresh stream from a
// parent plus an index, which is how experiments hand one stream to each
// trial or substage without coordination.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_(stream_id), base_(derive_base(seed, stream_id)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  std::uint64_t next_u64() { return value_at(counter_++); }

  // Uniform on [0,1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on the open interval (0,1): offset to the cell midpoint, so the
  // result is never 0 or 1 and quantile transforms are always defined.
  double next_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal draw by inverse-cdf transform of next_open(). Inherits
  // the determinism of the integer stream.
  double next_normal() { return std_normal_quantile(next_open()); }

  // Independent stream derived from this one and an index. Pure function of
  // (seed, stream_id, idx); does not advance or depend on the counter.
  RngStream child(std::uint64_t idx) const {
    return RngStream(seed_, mix(stream_ ^ mix(idx + 0x9E3779B97F4A7C15ull)));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_base(std::uint64_t seed, std::uint64_t stream) {
    return mix(seed + 0x9E3779B97F4A7C15ull) ^
           mix(stream * 0xDA942042E4DD58B5ull + 0x8BB84B93962EACC9ull);
  }

  std::uint64_t value_at(std::uint64_t i) const {
    // SplitMix64 evaluated at an arbitrary position of its Weyl sequence.
    return mix(base_ + (i + 1) * 0x9E3779B97F4A7C15ull);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace robust
