#include "qrt/campaign.hpp"

#include <algorithm>
#include <cmath>

namespace qrt {

namespace {

std::size_t expected_check_bits(const ScenarioSpec& sc) {
  const double sift_rate = (1.0 - sc.channel.loss_probability) * 0.5;
  const double expected =
      sc.session.check_fraction * static_cast<double>(sc.session.n_qubits) * sift_rate;
  return std::max<std::size_t>(1, static_cast<std::size_t>(expected));
}

BaselineModel calibrate_scenario(const ScenarioSpec& sc, const MonitorSettings& settings,
                                 const RandomSource& scenario_rng) {
  std::vector<double> samples;
  samples.reserve(settings.calibration_sessions);
  NullAdversary quiet;
  for (std::size_t i = 0; i < settings.calibration_sessions; ++i) {
    RandomSource rng = scenario_rng.fork(campaign_stream::kCalibrationBase + i);
    SessionTranscript t = run_session(sc.session, sc.channel, quiet, rng);
    if (t.aborted && t.abort_reason == AbortReason::InsufficientSiftedBits) continue;
    samples.push_back(t.qber_estimate);
  }
  return calibrate(samples, expected_check_bits(sc), settings.tuning);
}

}  // namespace

CampaignReport run_campaign(const Campaign& c, const BanditResume* resume,
                            BanditResume* resume_out) {
  if (c.scenarios.empty()) throw StructuralError("run_campaign: no scenarios");
  for (const auto& sc : c.scenarios) {
    if (sc.sessions == 0) throw StructuralError("run_campaign: sessions must be >= 1");
    sc.session.validate();
  }

  CampaignReport report;
  report.master_seed = c.master_seed;
  RandomSource master(c.master_seed, 0);

  for (std::size_t s = 0; s < c.scenarios.size(); ++s) {
    const ScenarioSpec& sc = c.scenarios[s];
    RandomSource scenario_rng = master.fork(s);

    ScenarioResult r;
    r.name = sc.name;
    r.sessions = sc.sessions;

    if (c.monitor.enabled) {
      r.monitored = true;
      r.baseline = calibrate_scenario(sc, c.monitor, scenario_rng);
    }

    const bool adaptive = sc.adversary.type == AdversarySpec::Type::Adaptive;
    std::vector<std::unique_ptr<AdversaryStrategy>> arms;
    BanditState bandit;
    RandomSource bandit_rng = scenario_rng.fork(campaign_stream::kBandit);
    if (adaptive) {
      if (sc.adversary.arms.empty())
        throw StructuralError("adaptive adversary needs at least one arm");
      for (const auto& arm : sc.adversary.arms) arms.push_back(make_adversary(arm));
      bandit = BanditState::fresh(arms.size(), sc.adversary.epsilon);
      if (resume != nullptr) {
        auto it = resume->find(sc.name);
        if (it != resume->end() && it->second.means.size() == arms.size()) {
          bandit = it->second;
          bandit.epsilon = sc.adversary.epsilon;
        }
      }
    }
    std::unique_ptr<AdversaryStrategy> fixed;
    if (!adaptive) fixed = make_adversary(sc.adversary);

    double qber_sum = 0.0, qber_sq_sum = 0.0, key_len_sum = 0.0, info_sum = 0.0;
    std::size_t detected_sessions = 0;
    CusumState cusum;

    for (std::size_t i = 0; i < sc.sessions; ++i) {
      RandomSource session_rng = scenario_rng.fork(i);
      AdversaryStrategy* adv = fixed.get();
      std::size_t arm = 0;
      if (adaptive) {
        arm = bandit_select(bandit, bandit_rng);
        adv = arms[arm].get();
      }

      SessionTranscript t = run_session(sc.session, sc.channel, *adv, session_rng);

      if (t.aborted) {
        r.aborts += 1;
        r.abort_reasons[abort_reason_name(*t.abort_reason)] += 1;
      }
      qber_sum += t.qber_estimate;
      qber_sq_sum += t.qber_estimate * t.qber_estimate;
      key_len_sum += static_cast<double>(t.alice_final_key.size());
      const double info = eve_information(t, adv->ledger());
      info_sum += info;

      if (adaptive) bandit_update(bandit, arm, session_reward(t, adv->ledger()));

      if (r.monitored) {
        auto [alert, next] = observe(r.baseline, i, t.qber_estimate, cusum);
        cusum = next;
        if (alert) {
          r.detections.push_back(*alert);
          detected_sessions += 1;
        }
      }

      if (c.full_transcripts) {
        auto tj = transcript_to_json(t);
        auto ledger = nlohmann::ordered_json::array();
        for (const auto& rec : adv->ledger()) {
          nlohmann::ordered_json rj;
          rj["qubit_index"] = rec.qubit_index;
          rj["action"] = eve_action_name(rec.action);
          if (rec.measured_basis)
            rj["measured_basis"] = basis_name(*rec.measured_basis);
          else
            rj["measured_basis"] = nullptr;
          if (rec.measured_bit)
            rj["measured_bit"] = static_cast<int>(*rec.measured_bit);
          else
            rj["measured_bit"] = nullptr;
          ledger.push_back(rj);
        }
        tj["eve_ledger"] = ledger;
        r.transcripts.push_back(std::move(tj));
      }
    }

    const auto m = static_cast<double>(sc.sessions);
    r.abort_rate = static_cast<double>(r.aborts) / m;
    r.qber_mean = qber_sum / m;
    r.qber_variance = std::max(0.0, qber_sq_sum / m - r.qber_mean * r.qber_mean);
    r.mean_final_key_length = key_len_sum / m;
    r.key_rate = r.mean_final_key_length / static_cast<double>(sc.session.n_qubits);
    r.eve_info_mean = info_sum / m;
    r.detection_rate = r.monitored ? static_cast<double>(detected_sessions) / m : 0.0;

    if (adaptive) {
      BanditSummary bs;
      bs.epsilon = bandit.epsilon;
      for (const auto& arm : sc.adversary.arms) bs.arm_names.push_back(arm.name());
      bs.pulls = bandit.pulls;
      bs.means = bandit.means;
      r.bandit = bs;
      if (resume_out != nullptr) (*resume_out)[sc.name] = bandit;
    }

    report.scenarios.push_back(std::move(r));
  }
  return report;
}

nlohmann::ordered_json campaign_report_to_json(const CampaignReport& report) {
  nlohmann::ordered_json j;
  j["master_seed"] = report.master_seed;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : report.scenarios) {
    nlohmann::ordered_json sj;
    sj["name"] = r.name;
    sj["sessions"] = r.sessions;
    sj["aborts"] = r.aborts;
    sj["abort_rate"] = r.abort_rate;
    auto reasons = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.abort_reasons) reasons[k] = v;
    sj["abort_reasons"] = reasons;
    sj["qber_mean"] = r.qber_mean;
    sj["qber_variance"] = r.qber_variance;
    sj["mean_final_key_length"] = r.mean_final_key_length;
    sj["key_rate"] = r.key_rate;
    sj["eve_information_gain"] = r.eve_info_mean;
    sj["detection_rate"] = r.detection_rate;
    if (r.monitored) {
      nlohmann::ordered_json bj;
      bj["mean_qber"] = r.baseline.mean_qber;
      bj["std_qber"] = r.baseline.std_qber;
      bj["calibration_sessions"] = r.baseline.calibration_sessions;
      bj["n_check"] = r.baseline.n_check;
      bj["z_threshold"] = r.baseline.z_threshold;
      bj["cusum_k"] = r.baseline.cusum_k;
      bj["cusum_h"] = r.baseline.cusum_h;
      sj["baseline"] = bj;
    } else {
      sj["baseline"] = nullptr;
    }
    auto detections = nlohmann::ordered_json::array();
    for (const auto& a : r.detections) {
      nlohmann::ordered_json aj;
      aj["session_index"] = a.session_index;
      aj["statistic"] = alert_statistic_name(a.statistic);
      aj["value"] = a.value;
      aj["severity"] = alert_severity_name(a.severity);
      detections.push_back(aj);
    }
    sj["detections"] = detections;
    if (r.bandit) {
      nlohmann::ordered_json bj;
      bj["epsilon"] = r.bandit->epsilon;
      bj["arm_names"] = r.bandit->arm_names;
      bj["pulls"] = r.bandit->pulls;
      bj["means"] = r.bandit->means;
      sj["bandit"] = bj;
    }
    if (!r.transcripts.empty()) {
      auto ts = nlohmann::ordered_json::array();
      for (const auto& t : r.transcripts) ts.push_back(t);
      sj["transcripts"] = ts;
    }
    arr.push_back(std::move(sj));
  }
  j["scenarios"] = arr;
  return j;
}

nlohmann::ordered_json bandit_resume_to_json(const BanditResume& resume) {
  nlohmann::ordered_json j;
  for (const auto& [name, state] : resume) {
    nlohmann::ordered_json sj;
    sj["epsilon"] = state.epsilon;
    sj["means"] = state.means;
    sj["pulls"] = state.pulls;
    j[name] = sj;
  }
  return j;
}

BanditResume bandit_resume_from_json(const nlohmann::ordered_json& j) {
  BanditResume out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    BanditState s;
    s.epsilon = it.value().at("epsilon").get<double>();
    s.means = it.value().at("means").get<std::vector<double>>();
    s.pulls = it.value().at("pulls").get<std::vector<std::uint64_t>>();
    if (s.means.size() != s.pulls.size())
      throw StructuralError("bandit resume: means/pulls length mismatch");
    out[it.key()] = s;
  }
  return out;
}

}  // namespace qrt
