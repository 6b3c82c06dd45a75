#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrt/adversary.hpp"
#include "qrt/quantum.hpp"
#include "qrt/rng.hpp"
#include "qrt/util.hpp"

#include "json.hpp"

namespace qrt {

struct KeyPolicy {
  enum class Kind { EntropyBound, FixedLength };
  Kind kind = Kind::EntropyBound;
  std::size_t fixed_length = 0;
};

struct SessionConfig {
  std::size_t n_qubits = 4096;
  double check_fraction = 0.1;
  double qber_abort_threshold = 0.11;
  std::size_t reconciliation_rounds = 4;
  std::size_t reconciliation_block_init = 16;
  std::size_t pa_safety_margin = 32;
  KeyPolicy key_policy;

  /// Throws StructuralError listing every violated invariant.
  void validate() const;
};

enum class AbortReason : std::uint8_t {
  QberThresholdExceeded,
  InsufficientSiftedBits,
  ReconciliationFailure,
};

const char* abort_reason_name(AbortReason r);

struct PhaseEvent {
  std::string phase;
  std::string event;
  std::int64_t value = 0;
};

/// Complete record of one session. Aborted sessions are valid transcripts
/// with aborted=true, not errors.
struct SessionTranscript {
  std::vector<std::uint8_t> alice_bits;
  std::vector<std::uint8_t> alice_bases;  // 0=rectilinear, 1=diagonal
  std::vector<std::uint8_t> bob_bases;
  std::vector<std::uint8_t> bob_outcomes;  // meaningful where lost_mask == 0
  std::vector<std::uint8_t> lost_mask;
  std::vector<std::uint8_t> sift_mask;
  std::vector<std::size_t> disclosed_indices;  // original qubit indices
  double qber_estimate = 0.0;
  std::size_t leakage_bits = 0;
  BitString alice_final_key;
  BitString bob_final_key;
  bool aborted = false;
  std::optional<AbortReason> abort_reason;
  std::vector<PhaseEvent> phase_log;

  std::vector<std::size_t> sifted_indices() const;
  /// Sifted indices minus disclosed check positions: the positions that
  /// feed reconciliation and amplification.
  std::vector<std::size_t> remaining_indices() const;
};

struct FinalKey {
  BitString bits;
  std::size_t length = 0;
  double qber_at_acceptance = 0.0;
};

struct QberEstimate {
  double qber = 0.0;
  std::size_t check_count = 0;
  std::size_t disagreements = 0;
  std::vector<std::size_t> check_positions;  // positions into the sifted sequence
};

struct ReconcileResult {
  bool success = false;
  BitString corrected;
  std::size_t leakage_bits = 0;
  std::size_t corrections = 0;
  std::vector<PhaseEvent> events;
};

/// Mask true where the qubit survived and both parties chose the same basis.
std::vector<std::uint8_t> sift(const std::vector<std::uint8_t>& alice_bases,
                               const std::vector<std::uint8_t>& bob_bases,
                               const std::vector<std::uint8_t>& lost_mask);

/// Discloses a uniformly random floor(check_fraction * n) subset and counts
/// disagreements. Throws StructuralError("insufficient_sifted_bits") when
/// fewer than 16 check bits would be drawn.
QberEstimate estimate_qber(const BitString& alice_sifted, const BitString& bob_sifted,
                           double check_fraction, RandomSource& rng);

/// Block-parity reconciliation: per round the key is shuffled and split
/// into blocks of doubling size; mismatched parities are binary-searched
/// and corrections re-activate earlier rounds' blocks. Every disclosed
/// parity counts toward leakage.
ReconcileResult reconcile(const BitString& alice_key, const BitString& bob_key,
                          const SessionConfig& cfg, RandomSource& rng);

double binary_entropy(double p);

/// Secure output length under the entropy-bound policy; a fixed-length
/// policy is additionally capped by the same bound.
std::size_t pa_output_length(std::size_t n, double qber, std::size_t leakage_bits,
                             const SessionConfig& cfg);

/// Toeplitz-family universal hash: output bit i is the parity of the input
/// masked by diagonal window i. `diag` must hold out_len + input_len - 1 bits.
BitString toeplitz_hash(const BitString& input, const BitString& diag, std::size_t out_len);

/// Compresses the reconciled key; the hash seed is drawn from rng, so both
/// parties must call with identically-positioned sources.
FinalKey privacy_amplify(const BitString& key, double qber, std::size_t leakage_bits,
                         const SessionConfig& cfg, RandomSource& rng);

/// Full pipeline: prepare -> adversary -> channel -> measure, then sift,
/// QBER estimation, abort policy, reconciliation, privacy amplification.
SessionTranscript run_session(const SessionConfig& cfg, const ChannelModel& ch,
                              AdversaryStrategy& adv, const RandomSource& session_rng);

/// Canonical JSON with stable field order; bit strings as hex plus explicit
/// bit length.
nlohmann::ordered_json transcript_to_json(const SessionTranscript& t);

// Child-stream ids used by run_session; fixed so replays are stable.
namespace session_stream {
constexpr std::uint64_t kAliceBits = 1;
constexpr std::uint64_t kAliceBases = 2;
constexpr std::uint64_t kBobBases = 3;
constexpr std::uint64_t kBobMeasure = 4;
constexpr std::uint64_t kChannel = 5;
constexpr std::uint64_t kAdversary = 6;
constexpr std::uint64_t kCheckSelect = 7;
constexpr std::uint64_t kReconcile = 8;
constexpr std::uint64_t kPrivacyAmp = 9;
}  // namespace session_stream

}  // namespace qrt
