#include "qrt/pqc/kat.hpp"

#include <fstream>
#include <sstream>

#include "qrt/pqc/lamport.hpp"
#include "qrt/pqc/lwe.hpp"
#include "qrt/pqc/merkle.hpp"
#include "qrt/rng.hpp"

namespace qrt::pqc {

namespace {

constexpr std::uint64_t kKatStream = 0x4b4154;  // dedicated KAT stream id

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string u64_hex(std::uint64_t v) {
  std::vector<std::uint8_t> bytes(8);
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<std::uint8_t>((v >> (8 * (7 - i))) & 0xff);
  return to_hex(bytes);
}

std::uint64_t u64_from_hex(const std::string& hex, std::size_t line) {
  auto bytes = from_hex(hex);
  if (bytes.size() != 8)
    throw StructuralError("malformed_record at line " + std::to_string(line) +
                          ": seed must be 8 bytes of hex");
  std::uint64_t v = 0;
  for (auto b : bytes) v = (v << 8) | b;
  return v;
}

std::string digest_hex_of(const Hash256& h, const std::vector<std::uint8_t>& bytes) {
  return digest_to_hex(h(bytes));
}

// Expected-field computation per scheme; shared by generate and run.
std::vector<std::pair<std::string, std::string>> compute_fields(const std::string& scheme,
                                                                std::uint64_t seed,
                                                                const HashPtr& hp) {
  const Hash256& h = *hp;
  RandomSource rng(seed, kKatStream);
  std::vector<std::pair<std::string, std::string>> f;
  f.emplace_back("seed", u64_hex(seed));

  if (scheme == "lamport") {
    auto kp = lamport_keygen(h, rng);
    Digest32 msg;
    for (int w = 0; w < 4; ++w) {
      std::uint64_t v = rng.next_u64();
      for (int i = 0; i < 8; ++i) msg[8 * w + i] = static_cast<std::uint8_t>((v >> (8 * i)) & 0xff);
    }
    auto sig = lamport_sign(kp, msg);
    f.emplace_back("msg", to_hex(msg));
    f.emplace_back("pk_digest", digest_hex_of(h, kp.public_key.serialize()));
    f.emplace_back("sig_digest", digest_hex_of(h, sig.serialize()));
    f.emplace_back("verify", lamport_verify(kp.public_key, msg, sig, h) ? "1" : "0");
    return f;
  }
  if (scheme.rfind("merkle-d", 0) == 0) {
    const unsigned depth = static_cast<unsigned>(std::stoul(scheme.substr(8)));
    MerkleKeySet ks(depth, hp, rng);
    Digest32 msg;
    for (int w = 0; w < 4; ++w) {
      std::uint64_t v = rng.next_u64();
      for (int i = 0; i < 8; ++i) msg[8 * w + i] = static_cast<std::uint8_t>((v >> (8 * i)) & 0xff);
    }
    auto sig = ks.sign(msg);
    f.emplace_back("msg", to_hex(msg));
    f.emplace_back("root", digest_to_hex(ks.root()));
    f.emplace_back("sig_digest", digest_hex_of(h, sig.serialize()));
    f.emplace_back("verify", merkle_verify(ks.root(), msg, sig, h) ? "1" : "0");
    return f;
  }
  if (scheme == "toy-lwe") {
    ToyLweParams params;  // library defaults
    auto kp = lwe_keygen(params, rng);
    const int bit = rng.next_bit();
    auto ct = lwe_encrypt(kp.public_key, bit, rng);
    std::vector<std::uint8_t> ct_bytes;
    for (auto v : ct.c1) {
      for (int i = 0; i < 4; ++i)
        ct_bytes.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
    }
    for (int i = 0; i < 4; ++i)
      ct_bytes.push_back(static_cast<std::uint8_t>((ct.c2 >> (8 * i)) & 0xff));
    f.emplace_back("bit", bit ? "01" : "00");
    f.emplace_back("ct", to_hex(ct_bytes));
    f.emplace_back("decrypted", lwe_decrypt(params, kp.secret, ct) ? "01" : "00");
    return f;
  }
  throw StructuralError("unknown KAT scheme: " + scheme);
}

}  // namespace

const std::string* KatRecord::find(const std::string& name) const {
  for (const auto& [k, v] : fields)
    if (k == name) return &v;
  return nullptr;
}

KatFile parse_kat(std::istream& in) {
  KatFile file;
  KatRecord current;
  bool in_record = false;
  std::string line;
  std::size_t lineno = 0;

  auto flush = [&]() {
    if (in_record) file.records.push_back(current);
    current = KatRecord{};
    in_record = false;
  };

  while (std::getline(in, line)) {
    lineno += 1;
    const std::string t = trim(line);
    if (t.empty()) {
      flush();
      continue;
    }
    if (t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw StructuralError("malformed_record at line " + std::to_string(lineno) +
                            ": expected `field = value`");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw StructuralError("malformed_record at line " + std::to_string(lineno) +
                            ": empty field name");
    if (key == "count") {
      flush();
      in_record = true;
      current.line = lineno;
      try {
        current.count = std::stoul(value);
      } catch (const std::exception&) {
        throw StructuralError("malformed_record at line " + std::to_string(lineno) +
                              ": count must be an integer");
      }
    } else if (!in_record) {
      if (key == "scheme") file.scheme = value;
      // other preamble fields are tolerated and ignored
    } else {
      current.fields.emplace_back(key, value);
    }
  }
  flush();
  return file;
}

KatFile parse_kat_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open KAT file: " + path);
  return parse_kat(in);
}

std::string format_kat(const KatFile& file) {
  std::ostringstream out;
  out << "# qrt known-answer tests\n";
  out << "scheme = " << file.scheme << "\n";
  for (const auto& rec : file.records) {
    out << "\ncount = " << rec.count << "\n";
    for (const auto& [k, v] : rec.fields) out << k << " = " << v << "\n";
  }
  return out.str();
}

std::vector<KatResult> run_kat(const std::string& scheme, const KatFile& file,
                               const HashPtr& h) {
  std::vector<KatResult> results;
  for (const auto& rec : file.records) {
    KatResult res;
    res.count = rec.count;
    const std::string* seed_hex = rec.find("seed");
    if (seed_hex == nullptr)
      throw StructuralError("malformed_record at line " + std::to_string(rec.line) +
                            ": missing seed field");
    const std::uint64_t seed = u64_from_hex(*seed_hex, rec.line);
    const auto expected = compute_fields(scheme, seed, h);
    for (const auto& [k, v] : rec.fields) {
      if (k == "seed") continue;
      const std::string* actual = nullptr;
      for (const auto& [ek, ev] : expected)
        if (ek == k) actual = &ev;
      if (actual == nullptr) {
        res.pass = false;
        res.diffs.push_back({k, v, "<field not produced by scheme>"});
      } else if (*actual != v) {
        res.pass = false;
        res.diffs.push_back({k, v, *actual});
      }
    }
    results.push_back(std::move(res));
  }
  return results;
}

KatFile generate_kat(const std::string& scheme, std::size_t count, std::uint64_t seed_base,
                     const HashPtr& h) {
  KatFile file;
  file.scheme = scheme;
  for (std::size_t i = 0; i < count; ++i) {
    KatRecord rec;
    rec.count = i;
    rec.fields = compute_fields(scheme, seed_base + i, h);
    file.records.push_back(std::move(rec));
  }
  return file;
}

}  // namespace qrt::pqc
