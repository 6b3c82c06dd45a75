#pragma once

#include <cstdint>

namespace qrt {

/// Deterministic counter-based generator. Output i is a pure function of
/// (seed, stream_id, i), so identical parameters replay bit-identically on
/// any platform and random access never perturbs other streams. fork()
/// derives statistically independent child streams for sub-simulations.
class RandomSource {
 public:
  RandomSource(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  /// One fair bit, served from an internal 64-bit buffer.
  int next_bit();

  /// Uniform double in [0, 1) with 53 random mantissa bits.
  double next_double();

  /// True with probability p.
  bool bernoulli(double p) { return next_double() < p; }

  /// Uniform integer in [0, bound); bound must be nonzero.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Child stream keyed by (this stream, child_id); deterministic and
  /// independent of draws already made from the parent.
  RandomSource fork(std::uint64_t child_id) const;

 private:
  RandomSource() = default;

  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  std::uint64_t bit_buffer_ = 0;
  int bits_left_ = 0;
};

}  // namespace qrt
