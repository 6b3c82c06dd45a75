#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qrt/util.hpp"

namespace qrt {

using Digest32 = std::array<std::uint8_t, 32>;

inline Digest32 zero_digest() { return Digest32{}; }

std::string digest_to_hex(const Digest32& d);
Digest32 digest_from_hex(const std::string& hex);

/// The single 256-bit hash every digest in the lab flows through. Schemes
/// take it by shared_ptr so tests can swap in instrumented doubles.
class Hash256 {
 public:
  virtual ~Hash256() = default;
  virtual Digest32 operator()(std::span<const std::uint8_t> data) const = 0;
  virtual std::string name() const = 0;

  Digest32 hash_string(const std::string& s) const {
    return (*this)(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  }
};

using HashPtr = std::shared_ptr<const Hash256>;

/// SHA-256 (FIPS 180-4), backed by OpenSSL.
class Sha256 final : public Hash256 {
 public:
  Digest32 operator()(std::span<const std::uint8_t> data) const override;
  std::string name() const override { return "sha-256"; }
};

/// Looks up a hash by registry name ("sha-256"); throws StructuralError on
/// unknown names.
HashPtr make_hash(const std::string& name);

/// Process default used everywhere a config does not say otherwise.
HashPtr default_hash();

/// Incremental convenience: digest over the concatenation of several parts.
Digest32 hash_parts(const Hash256& h, std::initializer_list<std::span<const std::uint8_t>> parts);

}  // namespace qrt
