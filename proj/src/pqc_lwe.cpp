#include "qrt/pqc/lwe.hpp"

namespace qrt::pqc {

namespace {
bool is_prime(std::uint32_t v) {
  if (v < 2) return false;
  for (std::uint64_t d = 2; d * d <= v; ++d)
    if (v % d == 0) return false;
  return true;
}
}  // namespace

void ToyLweParams::validate() const {
  if (n == 0 || m == 0) throw StructuralError("parameter_violation: n and m must be positive");
  if (q < 3 || q % 2 == 0 || !is_prime(q))
    throw StructuralError("parameter_violation: q must be an odd prime");
  if (static_cast<std::uint64_t>(q) <=
      8ull * static_cast<std::uint64_t>(error_bound) * static_cast<std::uint64_t>(m))
    throw StructuralError("parameter_violation: q must exceed 8 * error_bound * m");
}

ToyLweKeyPair lwe_keygen(const ToyLweParams& params, RandomSource& rng) {
  params.validate();
  ToyLweKeyPair kp;
  kp.public_key.params = params;
  kp.secret.resize(params.n);
  for (auto& s : kp.secret) s = static_cast<std::uint32_t>(rng.uniform_below(params.q));
  kp.public_key.a.assign(params.m, std::vector<std::uint32_t>(params.n));
  kp.public_key.b.resize(params.m);
  for (std::uint32_t i = 0; i < params.m; ++i) {
    std::uint64_t dot = 0;
    for (std::uint32_t j = 0; j < params.n; ++j) {
      kp.public_key.a[i][j] = static_cast<std::uint32_t>(rng.uniform_below(params.q));
      dot = (dot + static_cast<std::uint64_t>(kp.public_key.a[i][j]) * kp.secret[j]) % params.q;
    }
    // error uniform in [-error_bound, error_bound]
    const auto span = 2ull * params.error_bound + 1;
    const auto e = static_cast<std::int64_t>(rng.uniform_below(span)) -
                   static_cast<std::int64_t>(params.error_bound);
    std::int64_t v = (static_cast<std::int64_t>(dot) + e) % static_cast<std::int64_t>(params.q);
    if (v < 0) v += params.q;
    kp.public_key.b[i] = static_cast<std::uint32_t>(v);
  }
  return kp;
}

LweCiphertext lwe_encrypt(const ToyLwePublicKey& pk, int bit, RandomSource& rng) {
  pk.params.validate();
  if (bit != 0 && bit != 1) throw StructuralError("lwe_encrypt: bit must be 0 or 1");
  const std::uint32_t q = pk.params.q;
  LweCiphertext ct;
  ct.c1.assign(pk.params.n, 0);
  std::uint64_t acc = 0;
  for (std::uint32_t i = 0; i < pk.params.m; ++i) {
    if (!rng.next_bit()) continue;
    for (std::uint32_t j = 0; j < pk.params.n; ++j)
      ct.c1[j] = static_cast<std::uint32_t>((ct.c1[j] + static_cast<std::uint64_t>(pk.a[i][j])) % q);
    acc = (acc + pk.b[i]) % q;
  }
  if (bit) acc = (acc + q / 2) % q;
  ct.c2 = static_cast<std::uint32_t>(acc);
  return ct;
}

int lwe_decide_phase(std::uint32_t phase, std::uint32_t q) {
  const std::uint32_t half = q / 2;
  const std::uint32_t dist0 = std::min(phase, q - phase);
  const std::uint32_t d = phase > half ? phase - half : half - phase;
  const std::uint32_t dist1 = std::min(d, q - d);
  return dist1 < dist0 ? 1 : 0;  // exact tie decodes as 0
}

int lwe_decrypt(const ToyLweParams& params, const std::vector<std::uint32_t>& secret,
                const LweCiphertext& ct) {
  if (secret.size() != params.n || ct.c1.size() != params.n)
    throw StructuralError("lwe_decrypt: dimension mismatch");
  const std::uint32_t q = params.q;
  std::uint64_t dot = 0;
  for (std::uint32_t j = 0; j < params.n; ++j)
    dot = (dot + static_cast<std::uint64_t>(ct.c1[j]) * secret[j]) % q;
  const std::uint32_t phase =
      static_cast<std::uint32_t>((static_cast<std::uint64_t>(ct.c2) + q - dot) % q);
  return lwe_decide_phase(phase, q);
}

}  // namespace qrt::pqc
