#pragma once

#include <cstdint>
#include <vector>

#include "qrt/rng.hpp"
#include "qrt/util.hpp"

namespace qrt::pqc {

/// Desk-scale Regev-style single-bit LWE parameters. The reliability
/// precondition q > 8 * error_bound * m keeps worst-case subset-sum noise
/// below q/4, so decryption never fails at valid parameters.
struct ToyLweParams {
  std::uint32_t n = 8;
  std::uint32_t q = 3329;
  std::uint32_t error_bound = 3;
  std::uint32_t m = 64;

  void validate() const;  // throws StructuralError("parameter_violation: ...")
};

struct ToyLwePublicKey {
  ToyLweParams params;
  std::vector<std::vector<std::uint32_t>> a;  // m rows of n entries, mod q
  std::vector<std::uint32_t> b;               // b = A*s + e mod q
};

struct ToyLweKeyPair {
  ToyLwePublicKey public_key;
  std::vector<std::uint32_t> secret;  // n entries, mod q
};

struct LweCiphertext {
  std::vector<std::uint32_t> c1;  // n entries
  std::uint32_t c2 = 0;
};

ToyLweKeyPair lwe_keygen(const ToyLweParams& params, RandomSource& rng);

LweCiphertext lwe_encrypt(const ToyLwePublicKey& pk, int bit, RandomSource& rng);

/// Rounds the phase c2 - <c1,s>; an exact tie between the 0 and 1 encodings
/// decodes as 0.
int lwe_decrypt(const ToyLweParams& params, const std::vector<std::uint32_t>& secret,
                const LweCiphertext& ct);

/// Phase rounding rule exposed for tests: distance comparison on [0,q).
int lwe_decide_phase(std::uint32_t phase, std::uint32_t q);

}  // namespace qrt::pqc
