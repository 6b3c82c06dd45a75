#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrt/campaign.hpp"
#include "qrt/pqc/lwe.hpp"
#include "qrt/stateproof.hpp"

#include "json.hpp"

namespace qrt {

struct PqcAttacksConfig {
  bool ots_reuse = true;
  bool lwe_bruteforce = true;
  pqc::ToyLweParams lwe_demo_params{2, 17, 0, 16};  // breakable on purpose
  std::uint64_t lwe_budget = 1000000;
};

struct PqcSection {
  bool enabled = false;
  std::vector<std::string> schemes{"lamport", "merkle-d4", "toy-lwe"};
  std::size_t selfcheck_records = 4;
  std::vector<std::string> kat_files;
  PqcAttacksConfig attacks;
};

struct TimeTravelCase {
  double adversary_fraction = 0.3;
  bool classical_forgery = true;
  std::uint64_t target_round = 0;  // 0 -> midpoint of the chain
};

struct StateproofSection {
  bool enabled = false;
  std::vector<std::uint64_t> stakes{40, 30, 20, 10};
  unsigned merkle_depth = 4;
  std::string tau = "0.75";  // decimal text; compared exactly
  std::uint64_t cadence = 100;
  std::size_t epochs = 10;
  std::size_t checkpoint_epoch = 0;  // 0 -> epochs/2
  std::vector<TimeTravelCase> time_travel;

  stateproof::Rational tau_rational() const { return stateproof::Rational::from_decimal(tau); }
};

struct LabConfig {
  int schema_version = kSchemaVersion;
  std::uint64_t master_seed = 0;
  std::string output_dir = "qrt-out";
  bool full_transcripts = false;
  std::vector<ScenarioSpec> scenarios;
  MonitorSettings monitor;
  PqcSection pqc;
  StateproofSection stateproof;
  std::vector<std::string> warnings;  // lint findings, surfaced not fatal
};

struct ConfigViolation {
  std::string path;     // e.g. scenarios[0].channel.flip_probability
  std::string message;
};

/// Carries every violation found; loading is never fail-fast on values.
class ConfigValidationError : public StructuralError {
 public:
  explicit ConfigValidationError(std::vector<ConfigViolation> violations);
  const std::vector<ConfigViolation>& violations() const { return violations_; }

 private:
  std::vector<ConfigViolation> violations_;
};

/// Parses and validates; throws StructuralError("parse_error ...") on bad
/// JSON and ConfigValidationError on value violations.
LabConfig load_config(const std::string& path);
LabConfig config_from_json(const nlohmann::ordered_json& j);

/// Full echo with every default materialized; embedded in reports so no
/// default stays silent.
nlohmann::ordered_json effective_config_json(const LabConfig& cfg);

}  // namespace qrt
