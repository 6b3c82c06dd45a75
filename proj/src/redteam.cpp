#include "qrt/redteam.hpp"

#include <algorithm>

namespace qrt {

QubitState apply_intercept_resend(std::size_t index, const QubitState& q,
                                  const InterceptResendParams& p, RandomSource& rng,
                                  EveRecord& record) {
  record = EveRecord{index, std::nullopt, std::nullopt, EveAction::Passthrough};
  if (!rng.bernoulli(p.fraction)) return q;

  Basis eve_basis = p.basis_policy == InterceptResendParams::BasisPolicy::Random
                        ? basis_from_bit(rng.next_bit())
                        : p.fixed_basis;
  auto m = measure(q, eve_basis, rng);
  record.action = EveAction::MeasuredResent;
  record.measured_basis = eve_basis;
  record.measured_bit = m.outcome;
  return m.collapsed;  // forwarded state carries Eve's basis
}

nlohmann::ordered_json InterceptResendAdversary::params() const {
  nlohmann::ordered_json j;
  j["fraction"] = params_.fraction;
  j["basis_policy"] = params_.basis_policy == InterceptResendParams::BasisPolicy::Random
                          ? "random"
                          : basis_name(params_.fixed_basis);
  return j;
}

std::optional<QubitState> InterceptResendAdversary::on_qubit(std::size_t index,
                                                             const QubitState& q,
                                                             RandomSource& rng) {
  EveRecord rec;
  QubitState out = apply_intercept_resend(index, q, params_, rng, rec);
  ledger_.push_back(rec);
  return out;
}

double eve_information(const SessionTranscript& transcript,
                       const std::vector<EveRecord>& ledger) {
  const std::size_t n = transcript.alice_bits.size();
  for (const auto& r : ledger) {
    if (r.qubit_index >= n)
      throw StructuralError("eve_information: ledger index exceeds transcript length");
  }
  std::vector<const EveRecord*> by_index(n, nullptr);
  for (const auto& r : ledger) by_index[r.qubit_index] = &r;

  const auto positions = transcript.remaining_indices();
  if (positions.empty()) return 0.0;
  std::size_t credited = 0;
  for (std::size_t i : positions) {
    const EveRecord* r = by_index[i];
    if (r == nullptr || r->action != EveAction::MeasuredResent) continue;
    if (r->measured_basis && *r->measured_basis == basis_from_bit(transcript.alice_bases[i]))
      credited += 1;
  }
  return static_cast<double>(credited) / static_cast<double>(positions.size());
}

BanditState BanditState::fresh(std::size_t arms, double epsilon) {
  BanditState s;
  s.epsilon = epsilon;
  s.means.assign(arms, 0.0);
  s.pulls.assign(arms, 0);
  return s;
}

std::size_t bandit_select(const BanditState& state, RandomSource& rng) {
  if (state.means.empty()) throw StructuralError("bandit_select: no arms");
  if (rng.bernoulli(state.epsilon))
    return static_cast<std::size_t>(rng.uniform_below(state.means.size()));
  std::size_t best = 0;
  for (std::size_t i = 1; i < state.means.size(); ++i)
    if (state.means[i] > state.means[best]) best = i;  // lowest index wins ties
  return best;
}

void bandit_update(BanditState& state, std::size_t arm, double reward) {
  if (arm >= state.means.size()) throw StructuralError("bandit_update: arm out of range");
  state.pulls[arm] += 1;
  state.means[arm] += (reward - state.means[arm]) / static_cast<double>(state.pulls[arm]);
}

double session_reward(const SessionTranscript& t, const std::vector<EveRecord>& ledger) {
  if (t.aborted) return 0.0;
  const double info = eve_information(t, ledger);
  const double yield = static_cast<double>(t.alice_final_key.size()) /
                       static_cast<double>(t.alice_bits.size());
  return info * yield;
}

std::string AdversarySpec::name() const {
  switch (type) {
    case Type::None: return "none";
    case Type::InterceptResend: return "intercept_resend";
    default: return "adaptive";
  }
}

nlohmann::ordered_json AdversarySpec::to_json() const {
  nlohmann::ordered_json j;
  j["type"] = name();
  if (type == Type::InterceptResend) {
    j["fraction"] = intercept.fraction;
    j["basis_policy"] = intercept.basis_policy == InterceptResendParams::BasisPolicy::Random
                            ? "random"
                            : basis_name(intercept.fixed_basis);
  } else if (type == Type::Adaptive) {
    j["epsilon"] = epsilon;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& a : arms) arr.push_back(a.to_json());
    j["arms"] = arr;
  }
  return j;
}

std::unique_ptr<AdversaryStrategy> make_adversary(const AdversarySpec& spec) {
  switch (spec.type) {
    case AdversarySpec::Type::None:
      return std::make_unique<NullAdversary>();
    case AdversarySpec::Type::InterceptResend:
      return std::make_unique<InterceptResendAdversary>(spec.intercept);
    case AdversarySpec::Type::Adaptive:
      throw StructuralError("adaptive adversaries are driven per-session by the campaign runner");
  }
  throw StructuralError("unknown adversary type");
}

}  // namespace qrt
