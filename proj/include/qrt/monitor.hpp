#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qrt {

/// QBER baseline learned from attack-free calibration sessions. The
/// standard deviation is floored at the check-bit estimator granularity
/// 1/(2*sqrt(n_check)) so clean calibrations cannot zero it out.
struct BaselineModel {
  double mean_qber = 0.0;
  double std_qber = 0.0;
  std::size_t calibration_sessions = 0;
  std::size_t n_check = 0;
  double z_threshold = 4.0;
  double cusum_k = 0.0;
  double cusum_h = 0.0;
};

enum class AlertStatistic : std::uint8_t { ZScore, Cusum };
enum class AlertSeverity : std::uint8_t { Warning, Critical };

const char* alert_statistic_name(AlertStatistic s);
const char* alert_severity_name(AlertSeverity s);

struct Alert {
  std::size_t session_index = 0;
  AlertStatistic statistic = AlertStatistic::ZScore;
  double value = 0.0;
  AlertSeverity severity = AlertSeverity::Warning;
};

struct CusumState {
  double accumulator = 0.0;
};

struct MonitorTuning {
  double z_threshold = 4.0;
  /// Absent values default at calibration: k = one baseline std, h = 10k.
  std::optional<double> cusum_k;
  std::optional<double> cusum_h;
};

/// Fits mean/std over at least 20 samples in [0,1]; throws
/// StructuralError("too_few_samples") below that.
BaselineModel calibrate(const std::vector<double>& qber_samples, std::size_t n_check,
                        const MonitorTuning& tuning = {});

/// Pure single-observation step: z-score against the baseline plus a
/// one-sided CUSUM drift accumulator. When both statistics fire on one
/// observation the critical z-score alert is the one reported. Alerts never
/// reset the accumulator.
std::pair<std::optional<Alert>, CusumState> observe(const BaselineModel& b,
                                                    std::size_t session_index, double qber,
                                                    const CusumState& state);

}  // namespace qrt
