#pragma once

#include <cstdint>
#include <optional>

#include "qrt/rng.hpp"

namespace qrt {

/// The two conjugate BB84 encoding bases.
enum class Basis : std::uint8_t { Rectilinear = 0, Diagonal = 1 };

inline Basis basis_from_bit(int b) { return b ? Basis::Diagonal : Basis::Rectilinear; }
inline const char* basis_name(Basis b) {
  return b == Basis::Rectilinear ? "rectilinear" : "diagonal";
}

/// A prepared qubit: classical bit encoded in one of the two bases.
struct QubitState {
  std::uint8_t bit = 0;  // 0 or 1
  Basis basis = Basis::Rectilinear;

  bool operator==(const QubitState&) const = default;
};

/// Independent per-qubit bit-flip and loss; loss is sampled first.
struct ChannelModel {
  double flip_probability = 0.0;
  double loss_probability = 0.0;
};

struct MeasureResult {
  std::uint8_t outcome;
  QubitState collapsed;
};

QubitState prepare(int bit, Basis basis);

/// Matching basis reads the encoded bit and leaves the state intact; a
/// mismatched basis yields a fair coin and re-encodes the state in the
/// measuring basis. The returned state is always expressed in `basis`.
MeasureResult measure(const QubitState& q, Basis basis, RandomSource& rng);

/// Applies the channel: absent on loss, otherwise possibly bit-flipped.
/// The basis is never altered. Draws occur only for nonzero probabilities,
/// in loss-then-flip order.
std::optional<QubitState> transmit(const QubitState& q, const ChannelModel& ch,
                                   RandomSource& rng);

}  // namespace qrt
