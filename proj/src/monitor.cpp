#include "qrt/monitor.hpp"

#include <algorithm>
#include <cmath>

#include "qrt/util.hpp"

namespace qrt {

const char* alert_statistic_name(AlertStatistic s) {
  return s == AlertStatistic::ZScore ? "z_score" : "cusum";
}

const char* alert_severity_name(AlertSeverity s) {
  return s == AlertSeverity::Warning ? "warning" : "critical";
}

BaselineModel calibrate(const std::vector<double>& qber_samples, std::size_t n_check,
                        const MonitorTuning& tuning) {
  if (qber_samples.size() < 20) throw StructuralError("too_few_samples");
  if (n_check == 0) throw StructuralError("calibrate: n_check must be positive");
  for (double q : qber_samples)
    if (!(q >= 0.0 && q <= 1.0)) throw StructuralError("calibrate: sample outside [0,1]");

  const auto n = static_cast<double>(qber_samples.size());
  double mean = 0.0;
  for (double q : qber_samples) mean += q;
  mean /= n;
  double var = 0.0;
  for (double q : qber_samples) var += (q - mean) * (q - mean);
  var /= (n - 1.0);

  const double floor_std = 1.0 / (2.0 * std::sqrt(static_cast<double>(n_check)));
  BaselineModel b;
  b.mean_qber = mean;
  b.std_qber = std::max(std::sqrt(var), floor_std);
  b.calibration_sessions = qber_samples.size();
  b.n_check = n_check;
  b.z_threshold = tuning.z_threshold;
  b.cusum_k = tuning.cusum_k.value_or(b.std_qber);
  b.cusum_h = tuning.cusum_h.value_or(10.0 * b.cusum_k);
  return b;
}

std::pair<std::optional<Alert>, CusumState> observe(const BaselineModel& b,
                                                    std::size_t session_index, double qber,
                                                    const CusumState& state) {
  if (!(qber >= 0.0 && qber <= 1.0)) throw StructuralError("observe: qber outside [0,1]");
  const double z = (qber - b.mean_qber) / b.std_qber;
  CusumState next;
  next.accumulator = std::max(0.0, state.accumulator + (qber - b.mean_qber - b.cusum_k));

  std::optional<Alert> alert;
  if (next.accumulator >= b.cusum_h) {
    alert = Alert{session_index, AlertStatistic::Cusum, next.accumulator,
                  AlertSeverity::Warning};
  }
  if (z >= b.z_threshold) {
    // Critical outranks the drift warning on the same observation.
    alert = Alert{session_index, AlertStatistic::ZScore, z, AlertSeverity::Critical};
  }
  return {alert, next};
}

}  // namespace qrt
