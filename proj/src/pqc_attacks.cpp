#include "qrt/pqc/attacks.hpp"

namespace qrt::pqc {

AttackOutcome attack_ots_reuse(const LamportPublicKey& pk, const Digest32& msg1,
                               const LamportSignature& sig1, const Digest32& msg2,
                               const LamportSignature& sig2, const Digest32& target,
                               const Hash256& h) {
  if (!lamport_verify(pk, msg1, sig1, h) || !lamport_verify(pk, msg2, sig2, h))
    throw StructuralError("invalid_inputs: attack requires two verifying signatures");

  AttackOutcome out;
  LamportSignature forged;
  bool covered = true;
  for (std::size_t i = 0; i < 256; ++i) {
    out.effort += 1;
    const int want = digest_bit(target, i);
    if (digest_bit(msg1, i) == want) {
      forged.revealed[i] = sig1.revealed[i];
    } else if (digest_bit(msg2, i) == want) {
      forged.revealed[i] = sig2.revealed[i];
    } else {
      covered = false;
      break;
    }
  }
  if (!covered) {
    out.verdict = AttackOutcome::Verdict::Resisted;
    out.detail = "target digest has positions not covered by revealed preimages";
    return out;
  }
  out.verdict = AttackOutcome::Verdict::Broken;
  out.forged_signature = forged;
  out.evidence_verified = lamport_verify(pk, target, forged, h);
  out.detail = "forged signature assembled from revealed preimages";
  return out;
}

AttackOutcome attack_lwe_bruteforce(const ToyLwePublicKey& pk, std::uint64_t budget,
                                    RandomSource& evidence_rng) {
  const ToyLweParams& p = pk.params;
  p.validate();

  AttackOutcome out;
  // q^n with saturation; a saturated space never fits any budget.
  std::uint64_t space = 1;
  bool overflow = false;
  for (std::uint32_t i = 0; i < p.n; ++i) {
    if (space > budget / std::max<std::uint64_t>(1, p.q)) {
      overflow = true;
      break;
    }
    space *= p.q;
  }
  if (overflow || space > budget) {
    out.verdict = AttackOutcome::Verdict::Resisted;
    out.effort = budget;
    out.detail = "search space q^n exceeds operation budget";
    return out;
  }

  std::vector<std::uint32_t> candidate(p.n, 0);
  std::optional<std::vector<std::uint32_t>> found;
  bool ambiguous = false;
  auto consistent = [&](const std::vector<std::uint32_t>& s) {
    for (std::uint32_t i = 0; i < p.m; ++i) {
      std::uint64_t dot = 0;
      for (std::uint32_t j = 0; j < p.n; ++j)
        dot = (dot + static_cast<std::uint64_t>(pk.a[i][j]) * s[j]) % p.q;
      const auto diff =
          static_cast<std::uint32_t>((static_cast<std::uint64_t>(pk.b[i]) + p.q - dot) % p.q);
      const std::uint32_t centered = std::min(diff, p.q - diff);
      if (centered > p.error_bound) return false;
    }
    return true;
  };

  while (true) {
    out.effort += 1;
    if (consistent(candidate)) {
      if (found) {
        ambiguous = true;
        break;
      }
      found = candidate;
    }
    // lexicographic increment over Z_q^n
    std::uint32_t pos = 0;
    while (pos < p.n) {
      candidate[pos] += 1;
      if (candidate[pos] < p.q) break;
      candidate[pos] = 0;
      pos += 1;
    }
    if (pos == p.n) break;
  }

  if (!found || ambiguous) {
    out.verdict = AttackOutcome::Verdict::Resisted;
    out.detail = ambiguous ? "multiple consistent secrets; instance underdetermined"
                           : "no consistent secret in search space";
    return out;
  }

  out.verdict = AttackOutcome::Verdict::Broken;
  out.recovered_secret = found;
  // Evidence check: the recovered secret must decrypt fresh encryptions.
  out.evidence_verified = true;
  for (int trial = 0; trial < 32; ++trial) {
    const int bit = evidence_rng.next_bit();
    const LweCiphertext ct = lwe_encrypt(pk, bit, evidence_rng);
    if (lwe_decrypt(p, *found, ct) != bit) {
      out.evidence_verified = false;
      break;
    }
  }
  out.detail = "exhaustive search located a unique consistent secret";
  return out;
}

}  // namespace qrt::pqc
