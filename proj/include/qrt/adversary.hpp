#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrt/quantum.hpp"
#include "qrt/rng.hpp"

#include "json.hpp"

namespace qrt {

/// What the eavesdropper did with one qubit in flight.
enum class EveAction : std::uint8_t { Passthrough = 0, MeasuredResent = 1, Suppressed = 2 };

inline const char* eve_action_name(EveAction a) {
  switch (a) {
    case EveAction::Passthrough: return "passthrough";
    case EveAction::MeasuredResent: return "measured_resent";
    default: return "suppressed";
  }
}

/// Per-qubit ledger entry. measured_* are present exactly when the action
/// is MeasuredResent.
struct EveRecord {
  std::size_t qubit_index = 0;
  std::optional<Basis> measured_basis;
  std::optional<std::uint8_t> measured_bit;
  EveAction action = EveAction::Passthrough;
};

/// Classical traffic the adversary can observe: which positions survived
/// sifting and which check bits were disclosed.
struct ClassicalObservation {
  std::vector<std::uint8_t> sift_mask;
  std::vector<std::size_t> disclosed_indices;  // original qubit indices
  std::vector<std::uint8_t> disclosed_bits;    // Alice's disclosed values
};

/// Pluggable eavesdropper policy. A strategy is owned by one session at a
/// time; the ledger grows append-only within a session and is cleared by
/// begin_session().
class AdversaryStrategy {
 public:
  virtual ~AdversaryStrategy() = default;

  virtual std::string name() const = 0;
  virtual nlohmann::ordered_json params() const { return nlohmann::ordered_json::object(); }

  virtual void begin_session() { ledger_.clear(); }

  /// Called for every qubit in flight. Returning nullopt suppresses the
  /// qubit (it counts as lost). Must append exactly one ledger record.
  virtual std::optional<QubitState> on_qubit(std::size_t index, const QubitState& q,
                                             RandomSource& rng) = 0;

  /// Called once after sifting/check disclosure with everything public.
  virtual void on_classical(const ClassicalObservation&) {}

  const std::vector<EveRecord>& ledger() const { return ledger_; }

 protected:
  std::vector<EveRecord> ledger_;
};

/// Does nothing and records nothing.
class NullAdversary final : public AdversaryStrategy {
 public:
  std::string name() const override { return "none"; }
  std::optional<QubitState> on_qubit(std::size_t index, const QubitState& q,
                                     RandomSource&) override {
    ledger_.push_back(EveRecord{index, std::nullopt, std::nullopt, EveAction::Passthrough});
    return q;
  }
};

}  // namespace qrt
