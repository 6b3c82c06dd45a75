#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qrt/bb84.hpp"
#include "qrt/monitor.hpp"
#include "qrt/redteam.hpp"

#include "json.hpp"

namespace qrt {

struct MonitorSettings {
  bool enabled = true;
  std::size_t calibration_sessions = 50;
  MonitorTuning tuning;
};

struct ScenarioSpec {
  std::string name;
  ChannelModel channel;
  AdversarySpec adversary;
  SessionConfig session;
  std::size_t sessions = 10;
};

struct Campaign {
  std::uint64_t master_seed = 0;
  std::vector<ScenarioSpec> scenarios;
  MonitorSettings monitor;
  bool full_transcripts = false;
};

struct BanditSummary {
  double epsilon = 0.0;
  std::vector<std::string> arm_names;
  std::vector<std::uint64_t> pulls;
  std::vector<double> means;
};

struct ScenarioResult {
  std::string name;
  std::size_t sessions = 0;
  std::size_t aborts = 0;
  std::map<std::string, std::size_t> abort_reasons;
  double abort_rate = 0.0;
  double qber_mean = 0.0;
  double qber_variance = 0.0;
  double mean_final_key_length = 0.0;
  double key_rate = 0.0;           // final key bits per transmitted qubit
  double eve_info_mean = 0.0;      // adversary information gain
  double detection_rate = 0.0;
  bool monitored = false;
  BaselineModel baseline;
  std::vector<Alert> detections;
  std::optional<BanditSummary> bandit;
  // Populated only when Campaign.full_transcripts is set.
  std::vector<nlohmann::ordered_json> transcripts;
};

struct CampaignReport {
  std::uint64_t master_seed = 0;
  std::vector<ScenarioResult> scenarios;
};

/// Persisted adaptive-adversary statistics, keyed by scenario name.
using BanditResume = std::map<std::string, BanditState>;

/// Runs every scenario's sessions with sub-streams derived from
/// (master_seed, scenario index, session index); attaches monitor
/// detections; deterministic for a fixed Campaign value.
CampaignReport run_campaign(const Campaign& c, const BanditResume* resume = nullptr,
                            BanditResume* resume_out = nullptr);

nlohmann::ordered_json campaign_report_to_json(const CampaignReport& report);

nlohmann::ordered_json bandit_resume_to_json(const BanditResume& resume);
BanditResume bandit_resume_from_json(const nlohmann::ordered_json& j);

// Scenario-level child stream ids.
namespace campaign_stream {
constexpr std::uint64_t kCalibrationBase = 1ull << 32;
constexpr std::uint64_t kBandit = 1ull << 33;
}  // namespace campaign_stream

}  // namespace qrt
