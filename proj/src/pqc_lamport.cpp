#include "qrt/pqc/lamport.hpp"

#include <cstring>

namespace qrt::pqc {

namespace {
Preimage random_preimage(RandomSource& rng) {
  Preimage p;
  for (int w = 0; w < 4; ++w) {
    std::uint64_t v = rng.next_u64();
    std::memcpy(p.data() + 8 * w, &v, 8);
  }
  return p;
}
}  // namespace

std::vector<std::uint8_t> LamportPublicKey::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(2 * 256 * 32);
  for (const auto& side : digests)
    for (const auto& d : side) out.insert(out.end(), d.begin(), d.end());
  return out;
}

std::vector<std::uint8_t> LamportSignature::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(256 * 32);
  for (const auto& p : revealed) out.insert(out.end(), p.begin(), p.end());
  return out;
}

LamportKeyPair lamport_keygen(const Hash256& h, RandomSource& rng) {
  LamportKeyPair kp;
  for (int b = 0; b < 2; ++b) {
    for (int i = 0; i < 256; ++i) {
      kp.secret[b][i] = random_preimage(rng);
      kp.public_key.digests[b][i] = h(kp.secret[b][i]);
    }
  }
  return kp;
}

LamportSignature lamport_sign(LamportKeyPair& kp, const Digest32& msg) {
  if (kp.used) throw StructuralError("key_reuse_refused");
  kp.used = true;
  return lamport_sign_ignoring_reuse(kp, msg);
}

LamportSignature lamport_sign_ignoring_reuse(const LamportKeyPair& kp, const Digest32& msg) {
  LamportSignature sig;
  for (std::size_t i = 0; i < 256; ++i) sig.revealed[i] = kp.secret[digest_bit(msg, i)][i];
  return sig;
}

bool lamport_verify(const LamportPublicKey& pk, const Digest32& msg,
                    const LamportSignature& sig, const Hash256& h) {
  for (std::size_t i = 0; i < 256; ++i) {
    if (h(sig.revealed[i]) != pk.digests[digest_bit(msg, i)][i]) return false;
  }
  return true;
}

}  // namespace qrt::pqc
