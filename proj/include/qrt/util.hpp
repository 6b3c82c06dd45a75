#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrt {

/// Raised for malformed inputs, broken file formats, and interface misuse.
/// Domain outcomes (aborted sessions, failed attacks, invalid proofs) are
/// data, never exceptions.
class StructuralError : public std::runtime_error {
 public:
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

/// A key or transcript bit sequence, one bit per element (values 0/1).
using BitString = std::vector<std::uint8_t>;

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(const std::string& hex);

/// Packs bits MSB-first into bytes; the final byte is zero-padded low.
std::vector<std::uint8_t> pack_bits(const BitString& bits);
BitString unpack_bits(std::span<const std::uint8_t> bytes, std::size_t bit_length);

/// Hex encoding of a bit string together with its explicit bit length.
std::string bits_to_hex(const BitString& bits);
BitString bits_from_hex(const std::string& hex, std::size_t bit_length);

}  // namespace qrt
