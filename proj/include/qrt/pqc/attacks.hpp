#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qrt/pqc/lamport.hpp"
#include "qrt/pqc/lwe.hpp"

namespace qrt::pqc {

struct AttackOutcome {
  enum class Verdict { Broken, Resisted } verdict = Verdict::Resisted;
  std::uint64_t effort = 0;  // operations spent (candidates / coverage scan)
  std::optional<LamportSignature> forged_signature;
  std::optional<std::vector<std::uint32_t>> recovered_secret;
  /// Broken verdicts must survive re-verification by the scheme itself.
  bool evidence_verified = false;
  std::string detail;
};

inline const char* verdict_name(AttackOutcome::Verdict v) {
  return v == AttackOutcome::Verdict::Broken ? "broken" : "resisted";
}

/// One-time-signature reuse: two valid signatures under one key reveal
/// preimages covering positions where target bits match either message; a
/// fully covered target yields a forgery.
AttackOutcome attack_ots_reuse(const LamportPublicKey& pk, const Digest32& msg1,
                               const LamportSignature& sig1, const Digest32& msg2,
                               const LamportSignature& sig2, const Digest32& target,
                               const Hash256& h);

/// Exhaustive secret search over Z_q^n, attempted only when q^n fits the
/// budget; otherwise resisted with the budget reported as spent effort.
AttackOutcome attack_lwe_bruteforce(const ToyLwePublicKey& pk, std::uint64_t budget,
                                    RandomSource& evidence_rng);

}  // namespace qrt::pqc
