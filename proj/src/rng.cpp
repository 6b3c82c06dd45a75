#include "qrt/rng.hpp"

namespace qrt {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
constexpr std::uint64_t kStreamSalt = 0x5851f42d4c957f2dull;
constexpr std::uint64_t kForkSalt = 0xd6e8feb86659fd93ull;

// SplitMix64 finalizer; full 64-bit avalanche.
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}
}  // namespace

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      key_(mix64(mix64(seed + kGolden) ^ mix64(stream_id ^ kStreamSalt))) {}

std::uint64_t RandomSource::next_u64() {
  counter_ += 1;
  return mix64(key_ + counter_ * kGolden);
}

int RandomSource::next_bit() {
  if (bits_left_ == 0) {
    bit_buffer_ = next_u64();
    bits_left_ = 64;
  }
  int bit = static_cast<int>(bit_buffer_ & 1u);
  bit_buffer_ >>= 1;
  bits_left_ -= 1;
  return bit;
}

double RandomSource::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomSource::uniform_below(std::uint64_t bound) {
  // Lemire reduction; platform-stable via 128-bit widening multiply.
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
  return static_cast<std::uint64_t>(m >> 64);
}

RandomSource RandomSource::fork(std::uint64_t child_id) const {
  RandomSource child;
  child.seed_ = seed_;
  child.stream_id_ = mix64(stream_id_ ^ mix64(child_id ^ kForkSalt));
  child.key_ = mix64(key_ ^ mix64(child_id ^ kForkSalt));
  return child;
}

}  // namespace qrt
