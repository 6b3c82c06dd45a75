#include "qrt/stateproof.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace qrt::stateproof {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_digest(std::vector<std::uint8_t>& out, const Digest32& d) {
  out.insert(out.end(), d.begin(), d.end());
}

std::vector<std::uint8_t> attestation_bytes(const Attestation& a) {
  std::vector<std::uint8_t> out;
  put_u64(out, a.validator_id);
  put_u64(out, a.round);
  put_digest(out, a.signed_payload);
  auto sig = a.signature.serialize();
  put_u32(out, static_cast<std::uint32_t>(sig.size()));
  out.insert(out.end(), sig.begin(), sig.end());
  return out;
}

}  // namespace

Rational Rational::from_decimal(const std::string& text) {
  std::size_t dot = text.find('.');
  const std::string int_part = dot == std::string::npos ? text : text.substr(0, dot);
  const std::string frac_part = dot == std::string::npos ? "" : text.substr(dot + 1);
  if ((int_part.empty() && frac_part.empty()) ||
      int_part.find_first_not_of("0123456789") != std::string::npos ||
      frac_part.find_first_not_of("0123456789") != std::string::npos)
    throw StructuralError("invalid decimal fraction: " + text);
  if (frac_part.size() > 18) throw StructuralError("decimal fraction too precise: " + text);

  std::uint64_t den = 1;
  for (std::size_t i = 0; i < frac_part.size(); ++i) den *= 10;
  std::uint64_t int_val = 0;
  for (char c : int_part) int_val = int_val * 10 + static_cast<std::uint64_t>(c - '0');
  std::uint64_t frac_val = 0;
  for (char c : frac_part) frac_val = frac_val * 10 + static_cast<std::uint64_t>(c - '0');
  const std::uint64_t num = int_val * den + frac_val;
  const std::uint64_t g = std::gcd(num == 0 ? den : num, den);
  return Rational{num / g, den / g};
}

bool Rational::stake_meets(std::uint64_t stake, std::uint64_t total) const {
  using u128 = unsigned __int128;
  return static_cast<u128>(stake) * den >= static_cast<u128>(num) * total;
}

void ValidatorRegistry::validate() const {
  std::set<std::uint64_t> ids;
  std::uint64_t sum = 0;
  for (const auto& v : validators) {
    if (!ids.insert(v.id).second)
      throw StructuralError("registry: duplicate validator id " + std::to_string(v.id));
    sum += v.stake;
  }
  if (sum != total_stake) throw StructuralError("registry: total_stake does not match sum");
  if (total_stake == 0) throw StructuralError("registry: total stake must be positive");
}

const Validator* ValidatorRegistry::find(std::uint64_t id) const {
  for (const auto& v : validators)
    if (v.id == id) return &v;
  return nullptr;
}

nlohmann::ordered_json ValidatorRegistry::to_json() const {
  nlohmann::ordered_json j;
  j["total_stake"] = total_stake;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& v : validators) {
    nlohmann::ordered_json vj;
    vj["id"] = v.id;
    vj["stake"] = v.stake;
    vj["public_key"] = digest_to_hex(v.attestation_public_key);
    arr.push_back(vj);
  }
  j["validators"] = arr;
  return j;
}

ValidatorRegistry ValidatorRegistry::from_json(const nlohmann::ordered_json& j) {
  ValidatorRegistry r;
  r.total_stake = j.at("total_stake").get<std::uint64_t>();
  for (const auto& vj : j.at("validators")) {
    Validator v;
    v.id = vj.at("id").get<std::uint64_t>();
    v.stake = vj.at("stake").get<std::uint64_t>();
    v.attestation_public_key = digest_from_hex(vj.at("public_key").get<std::string>());
    r.validators.push_back(v);
  }
  r.validate();
  return r;
}

Digest32 epoch_payload_digest(const EpochState& epoch, const Hash256& h) {
  std::vector<std::uint8_t> buf;
  const std::string tag = "qrt-stateproof-attest-v1";
  buf.insert(buf.end(), tag.begin(), tag.end());
  put_u64(buf, epoch.round);
  put_digest(buf, epoch.state_digest);
  put_digest(buf, epoch.prev_proof_digest);
  return h(buf);
}

std::vector<std::uint8_t> canonical_proof_bytes(const StateProof& proof) {
  std::vector<std::uint8_t> out;
  put_u64(out, proof.epoch.round);
  put_digest(out, proof.epoch.state_digest);
  put_digest(out, proof.epoch.prev_proof_digest);
  put_u64(out, proof.attested_stake);
  put_u32(out, static_cast<std::uint32_t>(proof.aggregator_note.size()));
  out.insert(out.end(), proof.aggregator_note.begin(), proof.aggregator_note.end());
  put_u32(out, static_cast<std::uint32_t>(proof.attestations.size()));
  for (const auto& a : proof.attestations) {
    auto rec = attestation_bytes(a);
    put_u32(out, static_cast<std::uint32_t>(rec.size()));
    out.insert(out.end(), rec.begin(), rec.end());
  }
  return out;
}

Digest32 proof_digest(const StateProof& proof, const Hash256& h) {
  return h(canonical_proof_bytes(proof));
}

ProofSizeMetric proof_size_metric(const StateProof& proof) {
  ProofSizeMetric m;
  m.bytes = canonical_proof_bytes(proof).size();
  if (!proof.attestations.empty()) {
    StateProof header_only = proof;
    header_only.attestations.clear();
    const std::size_t header = canonical_proof_bytes(header_only).size();
    m.per_validator_bytes = (m.bytes - header) / proof.attestations.size();
  }
  return m;
}

namespace {

struct StakeCount {
  std::uint64_t stake = 0;
  std::vector<const Attestation*> valid;
  std::vector<std::string> reasons;
};

/// Shared validity scan: signature, epoch match, registry membership,
/// first-attestation-per-validator dedup.
StakeCount count_valid_stake(const std::vector<Attestation>& attestations,
                             const ValidatorRegistry& registry, const EpochState& epoch,
                             const Hash256& h, bool collect_reasons) {
  StakeCount out;
  const Digest32 payload = epoch_payload_digest(epoch, h);
  std::set<std::uint64_t> seen;
  for (const auto& a : attestations) {
    const Validator* v = registry.find(a.validator_id);
    if (v == nullptr) {
      if (collect_reasons) out.reasons.push_back("unknown_validator");
      continue;
    }
    if (a.round != epoch.round || a.signed_payload != payload) {
      if (collect_reasons) out.reasons.push_back("wrong_epoch");
      continue;
    }
    if (!pqc::merkle_verify(v->attestation_public_key, payload, a.signature, h)) {
      if (collect_reasons) out.reasons.push_back("invalid_signature");
      continue;
    }
    if (!seen.insert(a.validator_id).second) {
      if (collect_reasons) out.reasons.push_back("duplicate_attestation");
      continue;
    }
    out.stake += v->stake;
    out.valid.push_back(&a);
  }
  return out;
}

}  // namespace

AggregateResult aggregate(const std::vector<Attestation>& attestations,
                          const ValidatorRegistry& registry, const EpochState& epoch,
                          const Rational& tau, const Hash256& h,
                          const std::string& aggregator_note) {
  registry.validate();
  if (!(tau.to_double() > 0.5 && tau.to_double() <= 1.0))
    throw StructuralError("tau must be in (0.5, 1]");

  const StakeCount counted = count_valid_stake(attestations, registry, epoch, h, false);
  AggregateResult res;
  res.attested_stake = counted.stake;
  res.achieved_fraction =
      static_cast<double>(counted.stake) / static_cast<double>(registry.total_stake);
  if (!tau.stake_meets(counted.stake, registry.total_stake)) {
    res.ok = false;
    res.error = "insufficient_stake";
    return res;
  }
  res.ok = true;
  res.proof.epoch = epoch;
  for (const Attestation* a : counted.valid) res.proof.attestations.push_back(*a);
  res.proof.attested_stake = counted.stake;
  res.proof.attested_fraction = res.achieved_fraction;
  res.proof.aggregator_note = aggregator_note;
  return res;
}

VerifyResult verify_proof(const StateProof& proof, const ValidatorRegistry& registry,
                          const Digest32& expected_prev_digest, const Rational& tau,
                          std::uint64_t cadence, const Hash256& h) {
  registry.validate();
  VerifyResult res;
  if (cadence == 0) throw StructuralError("cadence must be positive");

  if (proof.epoch.round % cadence != 0 || proof.epoch.round == 0)
    res.reasons.push_back("cadence_violation");
  if (proof.epoch.prev_proof_digest != expected_prev_digest)
    res.reasons.push_back("linkage_broken");

  const StakeCount counted = count_valid_stake(proof.attestations, registry, proof.epoch, h, true);
  res.attested_stake = counted.stake;
  for (const auto& r : counted.reasons) res.reasons.push_back(r);
  if (proof.attested_stake != counted.stake) res.reasons.push_back("stake_mismatch");
  if (!tau.stake_meets(counted.stake, registry.total_stake))
    res.reasons.push_back("insufficient_stake");

  res.ok = res.reasons.empty();
  return res;
}

ChainVerifyResult verify_chain(const std::vector<StateProof>& proofs,
                               const ValidatorRegistry& registry,
                               const VerifierCheckpoint& origin, const Rational& tau,
                               std::uint64_t cadence, const Hash256& h) {
  ChainVerifyResult res;
  Digest32 expected_prev = zero_digest();
  std::uint64_t expected_round = cadence;
  if (origin.trust_origin == VerifierCheckpoint::Origin::Checkpoint) {
    expected_prev = origin.proof_digest;
    expected_round = origin.round + cadence;
  }

  std::optional<EpochState> head;
  for (const auto& proof : proofs) {
    if (origin.trust_origin == VerifierCheckpoint::Origin::Checkpoint &&
        proof.epoch.round <= origin.round)
      continue;  // already covered by the checkpoint
    if (proof.epoch.round != expected_round) {
      res.ok = false;
      res.failed_round = proof.epoch.round;
      res.reasons.push_back(proof.epoch.round % cadence == 0 ? "linkage_broken"
                                                             : "cadence_violation");
      return res;
    }
    VerifyResult vr = verify_proof(proof, registry, expected_prev, tau, cadence, h);
    if (!vr.ok) {
      res.ok = false;
      res.failed_round = proof.epoch.round;
      res.reasons = vr.reasons;
      return res;
    }
    expected_prev = proof_digest(proof, h);
    expected_round = proof.epoch.round + cadence;
    head = proof.epoch;
  }
  res.ok = true;
  res.verified_head = head;
  return res;
}

nlohmann::ordered_json proof_to_json(const StateProof& proof) {
  nlohmann::ordered_json j;
  j["round"] = proof.epoch.round;
  j["state_digest"] = digest_to_hex(proof.epoch.state_digest);
  j["prev_proof_digest"] = digest_to_hex(proof.epoch.prev_proof_digest);
  j["attested_stake"] = proof.attested_stake;
  j["attested_fraction"] = proof.attested_fraction;
  j["aggregator_note"] = proof.aggregator_note;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& a : proof.attestations) {
    nlohmann::ordered_json aj;
    aj["validator_id"] = a.validator_id;
    aj["round"] = a.round;
    aj["payload_digest"] = digest_to_hex(a.signed_payload);
    aj["leaf_index"] = a.signature.leaf_index;
    aj["ots"] = to_hex(a.signature.ots.serialize());
    aj["ots_public"] = to_hex(a.signature.ots_public.serialize());
    auto path = nlohmann::ordered_json::array();
    for (const auto& d : a.signature.auth_path) path.push_back(digest_to_hex(d));
    aj["auth_path"] = path;
    arr.push_back(std::move(aj));
  }
  j["attestations"] = arr;
  return j;
}

StateProof proof_from_json(const nlohmann::ordered_json& j) {
  StateProof p;
  p.epoch.round = j.at("round").get<std::uint64_t>();
  p.epoch.state_digest = digest_from_hex(j.at("state_digest").get<std::string>());
  p.epoch.prev_proof_digest = digest_from_hex(j.at("prev_proof_digest").get<std::string>());
  p.attested_stake = j.at("attested_stake").get<std::uint64_t>();
  p.attested_fraction = j.at("attested_fraction").get<double>();
  p.aggregator_note = j.at("aggregator_note").get<std::string>();
  for (const auto& aj : j.at("attestations")) {
    Attestation a;
    a.validator_id = aj.at("validator_id").get<std::uint64_t>();
    a.round = aj.at("round").get<std::uint64_t>();
    a.signed_payload = digest_from_hex(aj.at("payload_digest").get<std::string>());
    a.signature.leaf_index = aj.at("leaf_index").get<std::uint32_t>();

    const auto ots = from_hex(aj.at("ots").get<std::string>());
    if (ots.size() != 256 * 32) throw StructuralError("proof json: bad ots length");
    for (std::size_t i = 0; i < 256; ++i)
      std::copy_n(ots.begin() + static_cast<std::ptrdiff_t>(32 * i), 32,
                  a.signature.ots.revealed[i].begin());

    const auto pub = from_hex(aj.at("ots_public").get<std::string>());
    if (pub.size() != 2 * 256 * 32) throw StructuralError("proof json: bad ots_public length");
    for (int b = 0; b < 2; ++b)
      for (std::size_t i = 0; i < 256; ++i)
        std::copy_n(pub.begin() + static_cast<std::ptrdiff_t>(32 * (256 * b + i)), 32,
                    a.signature.ots_public.digests[b][i].begin());

    for (const auto& dj : aj.at("auth_path"))
      a.signature.auth_path.push_back(digest_from_hex(dj.get<std::string>()));
    p.attestations.push_back(std::move(a));
  }
  return p;
}

nlohmann::ordered_json chain_to_json(const std::vector<StateProof>& proofs) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : proofs) arr.push_back(proof_to_json(p));
  j["proofs"] = arr;
  return j;
}

std::vector<StateProof> chain_from_json(const nlohmann::ordered_json& j) {
  std::vector<StateProof> proofs;
  for (const auto& pj : j.at("proofs")) proofs.push_back(proof_from_json(pj));
  return proofs;
}

SimulatedNetwork::SimulatedNetwork(const std::vector<std::uint64_t>& stakes,
                                   unsigned merkle_depth, HashPtr hash, RandomSource& rng)
    : hash_(std::move(hash)) {
  if (stakes.empty()) throw StructuralError("SimulatedNetwork: need at least one validator");
  for (std::size_t i = 0; i < stakes.size(); ++i) {
    keysets_.push_back(std::make_unique<pqc::MerkleKeySet>(merkle_depth, hash_, rng));
    Validator v;
    v.id = i + 1;
    v.stake = stakes[i];
    v.attestation_public_key = keysets_.back()->root();
    registry_.validators.push_back(v);
    registry_.total_stake += stakes[i];
  }
  registry_.validate();
}

Attestation SimulatedNetwork::make_attestation(std::uint64_t validator_id,
                                               const EpochState& epoch) {
  const Validator* v = registry_.find(validator_id);
  if (v == nullptr) throw StructuralError("unknown_validator");
  const std::size_t pos = validator_id - 1;

  Attestation a;
  a.validator_id = validator_id;
  a.round = epoch.round;
  a.signed_payload = epoch_payload_digest(epoch, *hash_);
  a.signature = keysets_[pos]->sign(a.signed_payload);

  const auto key = std::make_pair(validator_id, a.signature.leaf_index);
  auto [it, inserted] = ledger_.emplace(key, a.signed_payload);
  if (!inserted && it->second != a.signed_payload)
    throw StructuralError("leaf reuse detected: one leaf signed two payloads");
  return a;
}

HonestChain build_honest_chain(SimulatedNetwork& net, std::size_t epochs,
                               std::uint64_t cadence, const Rational& tau,
                               RandomSource& rng) {
  HonestChain chain;
  Digest32 prev = zero_digest();
  for (std::size_t e = 1; e <= epochs; ++e) {
    EpochState epoch;
    epoch.round = e * cadence;
    for (auto& byte : epoch.state_digest) byte = static_cast<std::uint8_t>(rng.uniform_below(256));
    epoch.prev_proof_digest = prev;

    std::vector<Attestation> attestations;
    for (const auto& v : net.registry().validators)
      attestations.push_back(net.make_attestation(v.id, epoch));

    AggregateResult agg =
        aggregate(attestations, net.registry(), epoch, tau, net.hash(), "honest aggregator");
    if (!agg.ok) throw StructuralError("honest chain failed to aggregate: " + agg.error);
    prev = proof_digest(agg.proof, net.hash());
    chain.proofs.push_back(std::move(agg.proof));
  }
  return chain;
}

TimeTravelReport simulate_time_travel_attack(SimulatedNetwork& net, const HonestChain& history,
                                             double adversary_stake_fraction,
                                             bool classical_forgery,
                                             std::uint64_t target_round, const Rational& tau,
                                             std::uint64_t cadence, RandomSource& rng) {
  TimeTravelReport report;
  report.target_round = target_round;
  report.classical_forgery = classical_forgery;

  const ValidatorRegistry& reg = net.registry();
  // Corrupt validators greedily until the requested share is reached.
  std::vector<std::uint64_t> corrupted;
  std::uint64_t stake = 0;
  const double target_stake = adversary_stake_fraction * static_cast<double>(reg.total_stake);
  for (const auto& v : reg.validators) {
    if (static_cast<double>(stake + v.stake) <= target_stake + 1e-9) {
      corrupted.push_back(v.id);
      stake += v.stake;
    }
  }
  report.adversary_stake = stake;
  report.adversary_fraction = static_cast<double>(stake) / static_cast<double>(reg.total_stake);
  report.threshold_breached = tau.stake_meets(stake, reg.total_stake);

  // Rewritten epoch: fabricated state digest spliced onto the honest prefix.
  EpochState fork;
  fork.round = target_round;
  for (auto& byte : fork.state_digest) byte = static_cast<std::uint8_t>(rng.uniform_below(256));
  fork.prev_proof_digest = zero_digest();
  for (const auto& p : history.proofs) {
    if (p.epoch.round == target_round - cadence)
      fork.prev_proof_digest = proof_digest(p, net.hash());
  }

  // A future quantum computer mints classical signatures for free; they
  // carry no attestation stake and never enter the proof.
  if (classical_forgery)
    report.forged_classical_signatures = reg.validators.size();

  std::vector<Attestation> forged;
  for (std::uint64_t id : corrupted) forged.push_back(net.make_attestation(id, fork));

  AggregateResult agg =
      aggregate(forged, reg, fork, tau, net.hash(), "adversarial aggregator");
  report.aggregate_ok = agg.ok;

  // The untrusted aggregator emits a proof regardless; verifiers decide.
  StateProof forced;
  if (agg.ok) {
    forced = agg.proof;
  } else {
    forced.epoch = fork;
    forced.attestations = forged;
    forced.attested_stake = agg.attested_stake;
    forced.attested_fraction = agg.achieved_fraction;
    forced.aggregator_note = "adversarial aggregator";
  }

  std::vector<StateProof> branch;
  for (const auto& p : history.proofs)
    if (p.epoch.round < target_round) branch.push_back(p);
  branch.push_back(forced);

  ChainVerifyResult forked = verify_chain(branch, reg, VerifierCheckpoint::genesis(), tau,
                                          cadence, net.hash());
  report.rewrite_accepted = forked.ok;
  if (!forked.ok && !forked.reasons.empty()) report.rewrite_rejection_reason = forked.reasons[0];

  ChainVerifyResult honest = verify_chain(history.proofs, reg, VerifierCheckpoint::genesis(),
                                          tau, cadence, net.hash());
  report.honest_chain_ok = honest.ok;
  return report;
}

}  // namespace qrt::stateproof
