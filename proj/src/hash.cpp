#include "qrt/hash.hpp"

#include <openssl/sha.h>

namespace qrt {

std::string digest_to_hex(const Digest32& d) {
  return to_hex(std::span<const std::uint8_t>(d.data(), d.size()));
}

Digest32 digest_from_hex(const std::string& hex) {
  auto bytes = from_hex(hex);
  if (bytes.size() != 32) throw StructuralError("digest hex must be 32 bytes");
  Digest32 d;
  std::copy(bytes.begin(), bytes.end(), d.begin());
  return d;
}

Digest32 Sha256::operator()(std::span<const std::uint8_t> data) const {
  Digest32 out;
  SHA256(data.data(), data.size(), out.data());
  return out;
}

HashPtr make_hash(const std::string& name) {
  if (name == "sha-256") return std::make_shared<Sha256>();
  throw StructuralError("unknown hash function: " + name);
}

HashPtr default_hash() {
  static HashPtr h = std::make_shared<Sha256>();
  return h;
}

Digest32 hash_parts(const Hash256& h,
                    std::initializer_list<std::span<const std::uint8_t>> parts) {
  std::vector<std::uint8_t> buf;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  buf.reserve(total);
  for (const auto& p : parts) buf.insert(buf.end(), p.begin(), p.end());
  return h(buf);
}

}  // namespace qrt
