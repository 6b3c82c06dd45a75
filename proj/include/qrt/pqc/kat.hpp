#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "qrt/hash.hpp"

namespace qrt::pqc {

/// One `count = i` block from a response-style file: ordered field/value
/// pairs plus the line each field appeared on.
struct KatRecord {
  std::size_t count = 0;
  std::size_t line = 0;
  std::vector<std::pair<std::string, std::string>> fields;

  const std::string* find(const std::string& name) const;
};

struct KatFile {
  std::string scheme;  // from the preamble `scheme = <name>` line
  std::vector<KatRecord> records;
};

struct KatFieldDiff {
  std::string field;
  std::string expected;
  std::string actual;
};

struct KatResult {
  std::size_t count = 0;
  bool pass = true;
  std::vector<KatFieldDiff> diffs;
};

/// Parses the line-oriented `field = value` format with blank-line-separated
/// records headed by `count = N`. Throws StructuralError("malformed_record
/// at line N: ...") on syntax problems.
KatFile parse_kat(std::istream& in);
KatFile parse_kat_file(const std::string& path);

std::string format_kat(const KatFile& file);

/// Recomputes every record from its seed and compares each expected field.
/// Scheme names: "lamport", "merkle-d<depth>", "toy-lwe".
std::vector<KatResult> run_kat(const std::string& scheme, const KatFile& file,
                               const HashPtr& h);

/// Self-generates `count` records with seeds seed_base, seed_base+1, ...
KatFile generate_kat(const std::string& scheme, std::size_t count, std::uint64_t seed_base,
                     const HashPtr& h);

}  // namespace qrt::pqc
