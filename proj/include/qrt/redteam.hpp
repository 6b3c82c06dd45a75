#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qrt/adversary.hpp"
#include "qrt/bb84.hpp"
#include "qrt/quantum.hpp"

namespace qrt {

struct InterceptResendParams {
  double fraction = 1.0;  // probability a given qubit is intercepted
  enum class BasisPolicy { Random, Fixed } basis_policy = BasisPolicy::Random;
  Basis fixed_basis = Basis::Rectilinear;
};

/// One intercept-resend step on a single qubit. With probability `fraction`
/// Eve measures in a policy-chosen basis and forwards the collapsed state.
QubitState apply_intercept_resend(std::size_t index, const QubitState& q,
                                  const InterceptResendParams& p, RandomSource& rng,
                                  EveRecord& record);

class InterceptResendAdversary final : public AdversaryStrategy {
 public:
  explicit InterceptResendAdversary(InterceptResendParams params) : params_(params) {}

  std::string name() const override { return "intercept_resend"; }
  nlohmann::ordered_json params() const override;

  std::optional<QubitState> on_qubit(std::size_t index, const QubitState& q,
                                     RandomSource& rng) override;

  const InterceptResendParams& strategy_params() const { return params_; }

 private:
  InterceptResendParams params_;
};

/// Fraction of the pre-amplification key bits Eve provably knows: positions
/// where she measured-and-resent in Alice's preparation basis. Mismatched
/// bases earn no credit.
double eve_information(const SessionTranscript& transcript,
                       const std::vector<EveRecord>& ledger);

/// Epsilon-greedy arm statistics; rewards update by the incremental mean.
struct BanditState {
  double epsilon = 0.1;
  std::vector<double> means;
  std::vector<std::uint64_t> pulls;

  static BanditState fresh(std::size_t arms, double epsilon);
};

/// Explores uniformly with probability epsilon, otherwise exploits the arm
/// with the best mean (lowest index wins ties).
std::size_t bandit_select(const BanditState& state, RandomSource& rng);

void bandit_update(BanditState& state, std::size_t arm, double reward);

/// Session reward that encodes "learn the key without being caught":
/// information gain scaled by key yield, zeroed on abort.
double session_reward(const SessionTranscript& t, const std::vector<EveRecord>& ledger);

/// Adversary spec as campaign configs name them; builds a fresh strategy.
struct AdversarySpec {
  enum class Type { None, InterceptResend, Adaptive } type = Type::None;
  InterceptResendParams intercept;            // for InterceptResend
  std::vector<AdversarySpec> arms;            // for Adaptive
  double epsilon = 0.1;                       // for Adaptive

  std::string name() const;
  nlohmann::ordered_json to_json() const;
};

std::unique_ptr<AdversaryStrategy> make_adversary(const AdversarySpec& spec);

}  // namespace qrt
