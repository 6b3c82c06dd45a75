#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qrt/hash.hpp"
#include "qrt/pqc/merkle.hpp"
#include "qrt/rng.hpp"

#include "json.hpp"

namespace qrt::stateproof {

/// Exact threshold fraction; stake comparisons never touch floating point.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static Rational from_decimal(const std::string& text);
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  /// stake/total >= num/den, evaluated in 128-bit integers.
  bool stake_meets(std::uint64_t stake, std::uint64_t total) const;
};

struct Validator {
  std::uint64_t id = 0;
  std::uint64_t stake = 0;
  Digest32 attestation_public_key{};  // Merkle root
};

struct ValidatorRegistry {
  std::vector<Validator> validators;
  std::uint64_t total_stake = 0;

  void validate() const;
  const Validator* find(std::uint64_t id) const;

  nlohmann::ordered_json to_json() const;
  static ValidatorRegistry from_json(const nlohmann::ordered_json& j);
};

struct EpochState {
  std::uint64_t round = 0;
  Digest32 state_digest{};
  Digest32 prev_proof_digest{};  // all-zero at genesis
};

struct Attestation {
  std::uint64_t validator_id = 0;
  std::uint64_t round = 0;
  Digest32 signed_payload{};
  pqc::MerkleSignature signature;
};

struct StateProof {
  EpochState epoch;
  std::vector<Attestation> attestations;
  std::uint64_t attested_stake = 0;   // exact; the serialized quantity
  double attested_fraction = 0.0;     // attested_stake / total_stake, for reads
  std::string aggregator_note;
};

/// Canonical digest the validators sign for an epoch.
Digest32 epoch_payload_digest(const EpochState& epoch, const Hash256& h);

/// Deterministic field order, length-prefixed attestation records.
std::vector<std::uint8_t> canonical_proof_bytes(const StateProof& proof);
Digest32 proof_digest(const StateProof& proof, const Hash256& h);

struct ProofSizeMetric {
  std::size_t bytes = 0;
  std::size_t per_validator_bytes = 0;
};
ProofSizeMetric proof_size_metric(const StateProof& proof);

struct AggregateResult {
  bool ok = false;
  StateProof proof;                 // populated when ok
  std::uint64_t attested_stake = 0; // achieved, valid deduplicated stake
  double achieved_fraction = 0.0;
  std::string error;                // "insufficient_stake" when !ok
};

/// Drops invalid, duplicate, and foreign-epoch attestations, then applies
/// the exact threshold rule.
AggregateResult aggregate(const std::vector<Attestation>& attestations,
                          const ValidatorRegistry& registry, const EpochState& epoch,
                          const Rational& tau, const Hash256& h,
                          const std::string& aggregator_note = "");

struct VerifyResult {
  bool ok = false;
  std::vector<std::string> reasons;  // empty when ok
  std::uint64_t attested_stake = 0;  // recomputed from the registry
};

/// Standalone re-verification: every signature, stake recount, linkage and
/// cadence. Trusts nothing the aggregator wrote.
VerifyResult verify_proof(const StateProof& proof, const ValidatorRegistry& registry,
                          const Digest32& expected_prev_digest, const Rational& tau,
                          std::uint64_t cadence, const Hash256& h);

struct VerifierCheckpoint {
  enum class Origin { Genesis, Checkpoint } trust_origin = Origin::Genesis;
  std::uint64_t round = 0;      // meaningful for Checkpoint
  Digest32 proof_digest{};      // digest of the last verified proof

  static VerifierCheckpoint genesis() { return VerifierCheckpoint{}; }
  static VerifierCheckpoint at(std::uint64_t round, const Digest32& digest) {
    return VerifierCheckpoint{Origin::Checkpoint, round, digest};
  }
};

struct ChainVerifyResult {
  bool ok = false;
  std::optional<EpochState> verified_head;
  std::uint64_t failed_round = 0;       // when !ok
  std::vector<std::string> reasons;     // when !ok
};

/// Folds verify_proof along the digest linkage from the trust origin.
/// Proofs at or before a checkpoint round are skipped untouched.
ChainVerifyResult verify_chain(const std::vector<StateProof>& proofs,
                               const ValidatorRegistry& registry,
                               const VerifierCheckpoint& origin, const Rational& tau,
                               std::uint64_t cadence, const Hash256& h);

nlohmann::ordered_json proof_to_json(const StateProof& proof);
StateProof proof_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json chain_to_json(const std::vector<StateProof>& proofs);
std::vector<StateProof> chain_from_json(const nlohmann::ordered_json& j);

/// Registry plus live keysets: enough state to mint attestations and build
/// honest histories. Records every (validator, leaf) signing so reuse is
/// impossible to miss.
class SimulatedNetwork {
 public:
  SimulatedNetwork(const std::vector<std::uint64_t>& stakes, unsigned merkle_depth,
                   HashPtr hash, RandomSource& rng);

  const ValidatorRegistry& registry() const { return registry_; }
  const Hash256& hash() const { return *hash_; }
  HashPtr hash_ptr() const { return hash_; }

  /// Signs the canonical epoch payload with the validator's next leaf.
  /// Throws StructuralError("unknown_validator") / ("keys_exhausted").
  Attestation make_attestation(std::uint64_t validator_id, const EpochState& epoch);

  /// (validator, leaf) -> signed payload; the global non-reuse ledger.
  const std::map<std::pair<std::uint64_t, std::uint32_t>, Digest32>& signing_ledger() const {
    return ledger_;
  }

 private:
  ValidatorRegistry registry_;
  std::vector<std::unique_ptr<pqc::MerkleKeySet>> keysets_;
  std::map<std::pair<std::uint64_t, std::uint32_t>, Digest32> ledger_;
  HashPtr hash_;
};

struct HonestChain {
  std::vector<StateProof> proofs;  // rounds cadence, 2*cadence, ...
};

/// Every validator attests every epoch; state digests are drawn from rng.
HonestChain build_honest_chain(SimulatedNetwork& net, std::size_t epochs,
                               std::uint64_t cadence, const Rational& tau,
                               RandomSource& rng);

struct TimeTravelReport {
  std::uint64_t target_round = 0;
  double adversary_fraction = 0.0;       // exact stake share actually controlled
  std::uint64_t adversary_stake = 0;
  bool classical_forgery = false;
  std::uint64_t forged_classical_signatures = 0;
  bool aggregate_ok = false;             // threshold gate at the aggregator
  bool rewrite_accepted = false;         // verify_chain verdict on the fork
  std::string rewrite_rejection_reason;
  bool honest_chain_ok = false;
  bool threshold_breached = false;       // adversary stake reached tau
};

/// Rewrites history at target_round with an adversary controlling the given
/// stake share. Classical signatures are forgeable at zero cost when the
/// flag is set; attestation signatures are never forged.
TimeTravelReport simulate_time_travel_attack(SimulatedNetwork& net, const HonestChain& history,
                                             double adversary_stake_fraction,
                                             bool classical_forgery,
                                             std::uint64_t target_round, const Rational& tau,
                                             std::uint64_t cadence, RandomSource& rng);

}  // namespace qrt::stateproof
