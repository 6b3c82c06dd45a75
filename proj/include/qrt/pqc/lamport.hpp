#pragma once

#include <array>
#include <cstdint>

#include "qrt/hash.hpp"
#include "qrt/rng.hpp"

namespace qrt::pqc {

using Preimage = std::array<std::uint8_t, 32>;

/// Message-digest bit i, MSB-first within each byte.
inline int digest_bit(const Digest32& d, std::size_t i) {
  return (d[i / 8] >> (7 - i % 8)) & 1;
}

struct LamportPublicKey {
  // digests[b][i] = H(secret[b][i])
  std::array<std::array<Digest32, 256>, 2> digests;

  std::vector<std::uint8_t> serialize() const;
  bool operator==(const LamportPublicKey&) const = default;
};

struct LamportSignature {
  // revealed[i] is the preimage for message bit i.
  std::array<Preimage, 256> revealed;

  std::vector<std::uint8_t> serialize() const;
};

struct LamportKeyPair {
  std::array<std::array<Preimage, 256>, 2> secret;
  LamportPublicKey public_key;
  bool used = false;
};

LamportKeyPair lamport_keygen(const Hash256& h, RandomSource& rng);

/// One-shot: refuses a second signature (throws
/// StructuralError("key_reuse_refused")).
LamportSignature lamport_sign(LamportKeyPair& kp, const Digest32& msg);

/// Bypasses the one-time discipline. Exists solely so the attack battery
/// can model a faulty implementation that reused a key; never called from
/// protocol code.
LamportSignature lamport_sign_ignoring_reuse(const LamportKeyPair& kp, const Digest32& msg);

bool lamport_verify(const LamportPublicKey& pk, const Digest32& msg,
                    const LamportSignature& sig, const Hash256& h);

}  // namespace qrt::pqc
