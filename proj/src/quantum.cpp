#include "qrt/quantum.hpp"

#include "qrt/util.hpp"

namespace qrt {

QubitState prepare(int bit, Basis basis) {
  if (bit != 0 && bit != 1) throw StructuralError("qubit bit must be 0 or 1");
  return QubitState{static_cast<std::uint8_t>(bit), basis};
}

MeasureResult measure(const QubitState& q, Basis basis, RandomSource& rng) {
  if (basis == q.basis) {
    return MeasureResult{q.bit, q};
  }
  auto outcome = static_cast<std::uint8_t>(rng.next_bit());
  return MeasureResult{outcome, QubitState{outcome, basis}};
}

std::optional<QubitState> transmit(const QubitState& q, const ChannelModel& ch,
                                   RandomSource& rng) {
  if (ch.loss_probability > 0.0 && rng.bernoulli(ch.loss_probability)) {
    return std::nullopt;
  }
  QubitState out = q;
  if (ch.flip_probability > 0.0 && rng.bernoulli(ch.flip_probability)) {
    out.bit ^= 1u;
  }
  return out;
}

}  // namespace qrt
